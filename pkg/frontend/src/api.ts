/** Thin typed client for the platform API. All correctness (grading, points,
 *  badges) comes from the server; this module only transports JSON. */

import type {
  AnalyticsReport,
  ChallengePublic,
  Dashboard,
  QualityReport,
  SubmitResponse,
  UploadResult,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

interface RequestOptions {
  method?: string;
  body?: string;
  contentType?: string;
  admin?: boolean;
  query?: Record<string, string>;
}

export class ApiClient {
  token: string | null = null;
  adminToken: string | null = null;

  constructor(public readonly baseUrl: string) {}

  private async request(path: string, options: RequestOptions = {}): Promise<Response> {
    const url = new URL(path, this.baseUrl);
    for (const [key, value] of Object.entries(options.query ?? {})) {
      url.searchParams.set(key, value);
    }
    const headers: Record<string, string> = {};
    const bearer = options.admin ? this.adminToken : this.token;
    if (bearer) headers["Authorization"] = `Bearer ${bearer}`;
    if (options.contentType) headers["Content-Type"] = options.contentType;

    const response = await fetch(url, {
      method: options.method ?? "GET",
      headers,
      body: options.body,
    });
    if (!response.ok) {
      let code = "HttpError";
      let message = `request failed with status ${response.status}`;
      try {
        const payload = await response.json();
        code = payload.error ?? code;
        message = payload.message ?? message;
      } catch {
        // non-JSON error body; keep defaults
      }
      throw new ApiError(response.status, code, message);
    }
    return response;
  }

  async createSession(learnerId: string): Promise<string> {
    const response = await this.request("/api/session", {
      method: "POST",
      body: JSON.stringify({ learner_id: learnerId }),
      contentType: "application/json",
    });
    const { token } = await response.json();
    this.token = token;
    return token;
  }

  async challenges(filters: { category?: string; difficulty?: string } = {}): Promise<ChallengePublic[]> {
    const query: Record<string, string> = {};
    if (filters.category) query["category"] = filters.category;
    if (filters.difficulty) query["difficulty"] = filters.difficulty;
    return (await this.request("/api/challenges", { query })).json();
  }

  async featured(): Promise<ChallengePublic[]> {
    return (await this.request("/api/featured")).json();
  }

  /** Next recommended challenge, or null when the category is completed. */
  async next(category: string): Promise<ChallengePublic | null> {
    const response = await this.request("/api/next", { query: { category } });
    if (response.status === 204) return null;
    return response.json();
  }

  async submit(challengeId: string, answer: string, elapsedMs: number): Promise<SubmitResponse> {
    const response = await this.request("/api/submit", {
      method: "POST",
      body: JSON.stringify({
        challenge_id: challengeId,
        answer,
        client_elapsed_ms: Math.max(0, Math.round(elapsedMs)),
      }),
      contentType: "application/json",
    });
    return response.json();
  }

  async dashboard(): Promise<Dashboard> {
    return (await this.request("/api/learner/dashboard")).json();
  }

  async adminQuality(withSimilarity = false): Promise<QualityReport> {
    const query: Record<string, string> = withSimilarity ? { with_similarity: "true" } : {};
    return (await this.request("/api/admin/quality", { admin: true, query })).json();
  }

  async adminAnalytics(): Promise<AnalyticsReport> {
    return (await this.request("/api/admin/analytics", { admin: true })).json();
  }

  async adminUpload(content: string, format: "csv" | "json"): Promise<UploadResult> {
    return (
      await this.request("/api/admin/upload", {
        method: "POST",
        body: content,
        contentType: format === "json" ? "application/json" : "text/csv",
        admin: true,
        query: { format },
      })
    ).json();
  }
}

/** Where the UI should land after an API failure. */
export function routeForError(error: unknown): { route: string | null; banner: string } {
  if (error instanceof ApiError && error.status === 401) {
    return { route: "#/login", banner: "Session expired — please sign in again." };
  }
  if (error instanceof ApiError) {
    return { route: null, banner: `${error.code}: ${error.message}` };
  }
  return { route: null, banner: "API unreachable — check that the server is running." };
}
