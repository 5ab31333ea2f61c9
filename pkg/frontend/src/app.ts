/** DOM shell: hash routing + event wiring around the pure views and the
 *  solve-flow controller. Configuration is a single base-URL setting. */

import { ApiClient, routeForError } from "./api.js";
import { beginSolve, submitAnswer, type SolveState } from "./flow.js";
import {
  renderAdmin,
  renderChallengeCard,
  renderDashboard,
  renderErrorBanner,
  renderLogin,
  renderNav,
  renderSolve,
  renderUploadIssues,
} from "./views.js";

const BASE_URL =
  (document.querySelector("meta[name=api-base]") as HTMLMetaElement | null)?.content ??
  window.location.origin;

const api = new ApiClient(BASE_URL);
let solveState: SolveState | null = null;

const root = () => document.getElementById("app")!;

function show(active: string, body: string, banner = ""): void {
  root().innerHTML = renderNav(active) + banner + body;
}

function fail(error: unknown): void {
  const { route, banner } = routeForError(error);
  if (route) {
    window.location.hash = route;
    show("", renderLogin(), renderErrorBanner(banner));
  } else {
    root().insertAdjacentHTML("afterbegin", renderErrorBanner(banner));
  }
}

async function showLogin(): Promise<void> {
  show("", renderLogin());
  document.getElementById("login-form")!.addEventListener("submit", async (event) => {
    event.preventDefault();
    const learnerId = (document.getElementById("learner-id") as HTMLInputElement).value.trim();
    try {
      await api.createSession(learnerId);
      window.location.hash = "#/dashboard";
    } catch (error) {
      fail(error);
    }
  });
}

async function showDashboard(): Promise<void> {
  try {
    show("dashboard", renderDashboard(await api.dashboard()));
  } catch (error) {
    fail(error);
  }
}

async function showChallenges(): Promise<void> {
  try {
    const challenges = await api.challenges();
    const categories = [...new Set(challenges.map((c) => c.category))];
    const list = categories
      .map(
        (category) =>
          `<li><a href="#/solve/${encodeURIComponent(category)}">${category}</a> ` +
          `<span class="muted">${challenges.filter((c) => c.category === category).length} challenges</span></li>`,
      )
      .join("");
    const featured = await api.featured();
    const featuredBlock = featured.length
      ? `<h2>Featured</h2>${featured.map(renderChallengeCard).join("")}`
      : "";
    show("challenges", `<section><h1>Categories</h1><ul>${list}</ul>${featuredBlock}</section>`);
  } catch (error) {
    fail(error);
  }
}

function wireAnswerForm(): void {
  const form = document.getElementById("answer-form");
  if (!form) return;
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const answer = (document.getElementById("answer") as HTMLTextAreaElement).value;
    try {
      solveState = await submitAnswer(api, solveState!, answer);
      paintSolve();
    } catch (error) {
      fail(error);
    }
  });
}

function paintSolve(): void {
  if (!solveState) return;
  show("challenges", renderSolve(solveState.category, solveState.current, solveState.lastGrade));
  wireAnswerForm();
}

async function showSolve(category: string): Promise<void> {
  try {
    solveState = await beginSolve(api, category);
    paintSolve();
  } catch (error) {
    fail(error);
  }
}

async function showAdmin(): Promise<void> {
  if (!api.adminToken) {
    api.adminToken = window.prompt("Admin token:");
  }
  try {
    const [report, analytics] = await Promise.all([
      api.adminQuality(true),
      api.adminAnalytics(),
    ]);
    show("admin", renderAdmin(report, analytics));
    document.getElementById("upload-form")!.addEventListener("submit", async (event) => {
      event.preventDefault();
      const content = (document.getElementById("upload-content") as HTMLTextAreaElement).value;
      const format = (document.getElementById("upload-format") as HTMLSelectElement).value as
        | "csv"
        | "json";
      try {
        const result = await api.adminUpload(content, format);
        document.getElementById("upload-result")!.innerHTML =
          `<p>accepted ${result.accepted}, rejected ${result.rejected}</p>` +
          renderUploadIssues(result.issues);
      } catch (error) {
        fail(error);
      }
    });
  } catch (error) {
    fail(error);
  }
}

async function route(): Promise<void> {
  const hash = window.location.hash || "#/login";
  if (!api.token && hash !== "#/login" && !hash.startsWith("#/admin")) {
    window.location.hash = "#/login";
    return;
  }
  if (hash === "#/login") return showLogin();
  if (hash === "#/dashboard") return showDashboard();
  if (hash === "#/challenges") return showChallenges();
  if (hash.startsWith("#/solve/")) {
    return showSolve(decodeURIComponent(hash.slice("#/solve/".length)));
  }
  if (hash === "#/admin") return showAdmin();
  return showLogin();
}

window.addEventListener("hashchange", route);
window.addEventListener("DOMContentLoaded", route);
