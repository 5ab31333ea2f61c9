#!/usr/bin/env python3
"""Record API fixtures for the frontend render tests.

Spawns the platform on a scratch data dir with a deterministic 200-item demo
corpus, replays a fixed interaction script, and saves the raw response
bodies under tests/fixtures/. Re-run after any API change, then re-freeze
the HTML snapshots (delete tests/fixtures/*.html and run vitest once).
"""

import json
import pathlib
import subprocess
import sys
import tempfile
import time

import requests

PORT = 8903
BASE = f"http://127.0.0.1:{PORT}"
ADMIN = {"Authorization": "Bearer fixture-admin"}
OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def save(name: str, payload) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / name).write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    print("wrote", OUT / name)


def main() -> None:
    with tempfile.TemporaryDirectory() as workdir:
        corpus_csv = pathlib.Path(workdir) / "demo.csv"
        subprocess.run([sys.executable, "-m", "anveshana.cli", "synth",
                        str(corpus_csv), "--size", "200", "--seed", "9"], check=True)
        corpus_json = pathlib.Path(workdir) / "demo.json"
        subprocess.run([sys.executable, "-m", "anveshana.cli", "synth",
                        str(corpus_json), "--size", "200", "--seed", "9"], check=True)
        answers = {c["id"]: c["answer"] for c in json.loads(corpus_json.read_text())}

        server = subprocess.Popen(
            [sys.executable, "-m", "anveshana.cli", "serve",
             "--corpus", str(corpus_csv), "--port", str(PORT)],
            env={"PATH": "/usr/bin:/bin:/usr/local/bin",
                 "ANVESHANA_ADMIN_TOKEN": "fixture-admin",
                 "ANVESHANA_DATA_DIR": f"{workdir}/data"},
        )
        try:
            for _ in range(50):
                try:
                    requests.get(BASE, timeout=0.5)
                    break
                except requests.ConnectionError:
                    time.sleep(0.2)

            token = requests.post(f"{BASE}/api/session",
                                  json={"learner_id": "maya"}).json()["token"]
            headers = {"Authorization": f"Bearer {token}"}

            # a scripted session: one wrong try, three solves across categories
            nxt = requests.get(f"{BASE}/api/next", headers=headers,
                               params={"category": "Machine Learning"}).json()
            save("challenge.json", nxt)
            requests.post(f"{BASE}/api/submit", headers=headers,
                          json={"challenge_id": nxt["id"], "answer": "wrong guess",
                                "client_elapsed_ms": 4200})
            submit = requests.post(
                f"{BASE}/api/submit", headers=headers,
                json={"challenge_id": nxt["id"], "answer": answers[nxt["id"]],
                      "client_elapsed_ms": 9500}).json()
            save("submit.json", submit)
            for category in ("Deep Learning", "Transformers"):
                item = requests.get(f"{BASE}/api/next", headers=headers,
                                    params={"category": category}).json()
                requests.post(f"{BASE}/api/submit", headers=headers,
                              json={"challenge_id": item["id"],
                                    "answer": answers[item["id"]],
                                    "client_elapsed_ms": 3000})

            save("dashboard.json",
                 requests.get(f"{BASE}/api/learner/dashboard", headers=headers).json())
            save("quality.json",
                 requests.get(f"{BASE}/api/admin/quality", headers=ADMIN,
                              params={"with_similarity": "true"}).json())
            save("analytics.json",
                 requests.get(f"{BASE}/api/admin/analytics", headers=ADMIN).json())

            bad_upload = ("id,problem,answer,category,difficulty,tags,bloom_level\r\n"
                          'x1,"A new challenge about pruning","Prune low-signal weights",'
                          "Optimization,Easy,pruning,Understand\r\n"
                          'x2,"Too vague","",Optimization,Easy,,Understand\r\n'
                          'x3,"Bad level challenge","Fine answer",Optimization,Impossible,,Apply\r\n')
            save("upload_result.json",
                 requests.post(f"{BASE}/api/admin/upload", headers=ADMIN,
                               data=bad_upload.encode()).json())
        finally:
            server.terminate()
            server.wait()


if __name__ == "__main__":
    main()
