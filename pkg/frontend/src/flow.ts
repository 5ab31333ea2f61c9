/** Solve-flow controller: fetch-next → submit (with measured elapsed time) →
 *  show grade → fetch-next. Pure state transitions over the API client; the
 *  DOM shell only renders the returned state. */

import type { ApiClient } from "./api.js";
import type { ChallengePublic, Dashboard, GradeResult } from "./types.js";

export interface SolveState {
  category: string;
  current: ChallengePublic | null;
  startedAt: number;
  lastGrade: { grade: GradeResult; newBadges: string[] } | null;
  dashboard: Dashboard | null;
  completed: boolean;
}

export async function beginSolve(
  api: ApiClient,
  category: string,
  now: () => number = Date.now,
): Promise<SolveState> {
  const current = await api.next(category);
  return {
    category,
    current,
    startedAt: now(),
    lastGrade: null,
    dashboard: null,
    completed: current === null,
  };
}

/** Submit the learner's answer for the current challenge, then advance. */
export async function submitAnswer(
  api: ApiClient,
  state: SolveState,
  answer: string,
  now: () => number = Date.now,
): Promise<SolveState> {
  if (state.current === null) {
    throw new Error("nothing to submit: category already completed");
  }
  const elapsed = Math.max(0, now() - state.startedAt);
  const response = await api.submit(state.current.id, answer, elapsed);
  // correctness comes exclusively from the server's grade
  const next = response.grade.correct ? await api.next(state.category) : state.current;
  return {
    category: state.category,
    current: next,
    startedAt: now(),
    lastGrade: { grade: response.grade, newBadges: response.new_badges },
    dashboard: response.dashboard,
    completed: next === null,
  };
}
