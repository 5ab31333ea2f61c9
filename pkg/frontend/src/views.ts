/** Pure view functions: every screen is rendered from API payloads alone,
 *  deterministically, so tests can compare output byte-for-byte against
 *  recorded fixtures. No view ever receives or renders an answer field. */

import type {
  AnalyticsReport,
  ChallengePublic,
  Dashboard,
  GradeResult,
  QualityReport,
  SimilarityHistogram,
  UploadIssue,
} from "./types.js";

export const BLOOM_LEVELS = ["Remember", "Understand", "Apply", "Analyze", "Evaluate", "Create"];
export const DIFFICULTIES = ["Easy", "Medium", "Hard", "Expert"];

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

const pct = (value: number): string => `${Math.round(value * 100)}%`;

export function renderNav(active: string): string {
  const tabs = [
    { id: "dashboard", label: "Dashboard", href: "#/dashboard", enabled: true },
    { id: "challenges", label: "Challenges", href: "#/challenges", enabled: true },
    { id: "playground", label: "Playground", href: "#", enabled: false },
    { id: "simulator", label: "Simulator", href: "#", enabled: false },
    { id: "community", label: "Community", href: "#", enabled: false },
    { id: "admin", label: "Admin", href: "#/admin", enabled: true },
  ];
  const items = tabs
    .map((tab) => {
      const classes = [
        "nav-item",
        tab.id === active ? "active" : "",
        tab.enabled ? "" : "disabled",
      ]
        .filter(Boolean)
        .join(" ");
      const title = tab.enabled ? "" : ' title="Coming soon"';
      return `<a class="${classes}" href="${tab.href}"${title}>${tab.label}</a>`;
    })
    .join("");
  return `<nav class="topnav">${items}</nav>`;
}

export function renderErrorBanner(message: string): string {
  return `<div class="banner error" role="alert">${escapeHtml(message)}</div>`;
}

export function renderLogin(): string {
  return [
    '<section class="login">',
    "<h1>Welcome back</h1>",
    "<p>Sign in to continue your learning streak.</p>",
    '<form id="login-form">',
    '<input id="learner-id" name="learner_id" placeholder="learner id" required>',
    '<button type="submit">Start learning</button>',
    "</form>",
    "</section>",
  ].join("");
}

export function renderBadge(id: string): string {
  return `<span class="badge" data-badge="${escapeHtml(id)}">${escapeHtml(id)}</span>`;
}

export function renderDashboard(dash: Dashboard): string {
  const badges = dash.badges.length
    ? dash.badges.map(renderBadge).join("")
    : '<span class="muted">none yet</span>';
  const categories = Object.entries(dash.per_category_mastery)
    .map(([category, record]) => {
      const width = pct(record.mastery);
      return (
        `<li class="category-row"><span class="category-name">${escapeHtml(category)}</span>` +
        `<span class="bar"><span class="fill" style="width:${width}"></span></span>` +
        `<span class="mastery" data-mastery="${record.mastery}">${width}</span>` +
        `<span class="attempts">${record.attempts} attempts</span></li>`
      );
    })
    .join("");
  return [
    '<section class="dashboard">',
    `<h1>Hello, ${escapeHtml(dash.learner_id)}</h1>`,
    '<div class="stat-grid">',
    `<div class="stat"><span class="stat-value" data-stat="level">${dash.level}</span><span class="stat-label">level</span></div>`,
    `<div class="stat"><span class="stat-value" data-stat="streak">${dash.streak_days}</span><span class="stat-label">day streak</span></div>`,
    `<div class="stat"><span class="stat-value" data-stat="points">${dash.points}</span><span class="stat-label">points</span></div>`,
    `<div class="stat"><span class="stat-value" data-stat="solved">${dash.solved_count}</span><span class="stat-label">solved of ${dash.totals.corpus_size}</span></div>`,
    "</div>",
    `<h2>Badges</h2><div class="badges">${badges}</div>`,
    `<h2>Mastery by category</h2><ul class="categories">${categories}</ul>`,
    `<p class="totals">${dash.totals.categories_explored} of ${dash.totals.categories} categories explored · ${dash.totals.attempts} total attempts</p>`,
    "</section>",
  ].join("");
}

export function renderChallengeCard(challenge: ChallengePublic): string {
  const tags = challenge.tags.map((t) => `<span class="tag">${escapeHtml(t)}</span>`).join("");
  return [
    `<article class="challenge" data-id="${escapeHtml(challenge.id)}">`,
    `<header><span class="difficulty ${challenge.difficulty.toLowerCase()}">${escapeHtml(challenge.difficulty)}</span>` +
      `<span class="bloom">${escapeHtml(challenge.bloom_level)}</span>` +
      `<span class="category">${escapeHtml(challenge.category)}</span></header>`,
    `<p class="problem">${escapeHtml(challenge.problem)}</p>`,
    `<footer>${tags}</footer>`,
    "</article>",
  ].join("");
}

export function renderGradePanel(grade: GradeResult, newBadges: string[]): string {
  const verdict = grade.correct
    ? `<p class="verdict correct">Correct! +${grade.points_awarded} points</p>`
    : '<p class="verdict incorrect">Not quite — try again.</p>';
  const method = `<p class="method">graded by ${escapeHtml(grade.method)}${
    grade.similarity === null ? "" : ` (similarity ${grade.similarity.toFixed(3)})`
  }</p>`;
  const badges = newBadges.length
    ? `<div class="new-badges">New badges: ${newBadges.map(renderBadge).join("")}</div>`
    : "";
  return `<div class="grade-panel">${verdict}${method}${badges}</div>`;
}

export function renderSolve(
  category: string,
  challenge: ChallengePublic | null,
  lastGrade: { grade: GradeResult; newBadges: string[] } | null,
): string {
  if (challenge === null) {
    return [
      '<section class="solve complete">',
      `<h1>${escapeHtml(category)}</h1>`,
      '<p class="completion">Category complete — every challenge solved. 🎉</p>',
      '<a href="#/dashboard">Back to dashboard</a>',
      "</section>",
    ].join("");
  }
  return [
    '<section class="solve">',
    `<h1>${escapeHtml(category)}</h1>`,
    lastGrade ? renderGradePanel(lastGrade.grade, lastGrade.newBadges) : "",
    renderChallengeCard(challenge),
    '<form id="answer-form">',
    '<textarea id="answer" name="answer" placeholder="your answer" required></textarea>',
    '<button type="submit">Submit</button>',
    "</form>",
    "</section>",
  ].join("");
}

export function renderHeatmap(counts: number[][]): string {
  const header = DIFFICULTIES.map((d) => `<th scope="col">${d}</th>`).join("");
  const rows = counts
    .map((row, i) => {
      const cells = row
        .map((value) => `<td class="cell" data-count="${value}">${value}</td>`)
        .join("");
      return `<tr><th scope="row">${BLOOM_LEVELS[i]}</th>${cells}</tr>`;
    })
    .join("");
  return [
    '<table class="heatmap" aria-label="challenge counts by cognitive level and difficulty">',
    `<thead><tr><th></th>${header}</tr></thead>`,
    `<tbody>${rows}</tbody>`,
    "</table>",
  ].join("");
}

export function renderAssociationMatrix(matrix: number[][], labels: string[]): string {
  const header = labels.map((l) => `<th scope="col">${escapeHtml(l)}</th>`).join("");
  const rows = matrix
    .map((row, i) => {
      const cells = row
        .map((value) => `<td class="cell" data-v="${value.toFixed(3)}">${value.toFixed(3)}</td>`)
        .join("");
      return `<tr><th scope="row">${escapeHtml(labels[i] ?? "")}</th>${cells}</tr>`;
    })
    .join("");
  return [
    '<table class="association" aria-label="cross-dimensional association">',
    `<thead><tr><th></th>${header}</tr></thead>`,
    `<tbody>${rows}</tbody>`,
    "</table>",
  ].join("");
}

export function renderHistogram(hist: SimilarityHistogram | null): string {
  if (hist === null) {
    return '<p class="muted">Similarity histogram not computed.</p>';
  }
  const peak = Math.max(...hist.bins, 1);
  const bars = hist.bins
    .map((count, i) => {
      const low = (-1 + i * hist.bin_width).toFixed(2);
      const height = Math.round((count / peak) * 100);
      return `<span class="hbar" data-bin="${low}" data-n="${count}" style="height:${height}%"></span>`;
    })
    .join("");
  return [
    `<div class="histogram" data-n="${hist.n}" data-mean="${hist.mean.toFixed(3)}" ` +
      `data-mode="[${hist.mode_bin[0].toFixed(2)},${hist.mode_bin[1].toFixed(2)}]">`,
    bars,
    "</div>",
  ].join("");
}

export function renderUploadIssues(issues: UploadIssue[]): string {
  if (!issues.length) return "";
  const rows = issues
    .map(
      (issue) =>
        `<li class="issue"><code>row ${issue.record_index}</code> ` +
        `<span class="code">${escapeHtml(issue.code)}</span> ` +
        `${escapeHtml(issue.message)}</li>`,
    )
    .join("");
  return `<ul class="issues">${rows}</ul>`;
}

export function renderAdmin(report: QualityReport, analytics: AnalyticsReport | null): string {
  const dims = Object.entries(report.per_dimension)
    .map(
      ([name, metrics]) =>
        `<tr><td>${escapeHtml(name)}</td><td>${metrics.k_total}</td>` +
        `<td>${metrics.effective_categories.toFixed(2)}</td>` +
        `<td>${metrics.entropy_bits.toFixed(3)}</td>` +
        `<td>${metrics.concentration_index === null ? "–" : metrics.concentration_index.toFixed(3)}</td>` +
        `<td>${metrics.sample_size}</td></tr>`,
    )
    .join("");
  const analyticsBlock = analytics
    ? `<p class="analytics-summary">overall accuracy ${analytics.overall.accuracy.toFixed(3)} · ` +
      `completion ${analytics.overall.completion_rate.toFixed(3)} · ` +
      `${analytics.overall.attempts} attempts</p>`
    : "";
  return [
    '<section class="admin">',
    "<h1>Corpus quality</h1>",
    '<table class="dimensions"><thead><tr><th>dimension</th><th>k</th><th>effective</th>' +
      "<th>entropy (bits)</th><th>concentration</th><th>n</th></tr></thead>" +
      `<tbody>${dims}</tbody></table>`,
    "<h2>Cognitive level × difficulty</h2>",
    renderHeatmap(report.bloom_difficulty_counts),
    "<h2>Association (Cramér's V)</h2>",
    renderAssociationMatrix(report.pairwise_cramers_v, Object.keys(report.per_dimension)),
    "<h2>Question–answer similarity</h2>",
    renderHistogram(report.qa_similarity),
    analyticsBlock,
    "<h2>Upload challenges</h2>",
    '<form id="upload-form"><textarea id="upload-content" placeholder="paste CSV or JSON"></textarea>' +
      '<select id="upload-format"><option value="csv">CSV</option><option value="json">JSON</option></select>' +
      '<button type="submit">Upload</button></form>',
    '<div id="upload-result"></div>',
    "</section>",
  ].join("");
}
