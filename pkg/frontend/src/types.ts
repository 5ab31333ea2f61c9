/** Payload shapes of the platform HTTP API. The answer field never reaches
 *  the client, so no type here carries one. */

export interface ChallengePublic {
  id: string;
  problem: string;
  category: string;
  difficulty: string;
  tags: string[];
  bloom_level: string;
}

export interface MasteryEntry {
  mastery: number;
  attempts: number;
}

export interface Dashboard {
  learner_id: string;
  points: number;
  level: number;
  streak_days: number;
  last_active_day: string | null;
  badges: string[];
  solved_count: number;
  per_category_mastery: Record<string, MasteryEntry>;
  totals: {
    corpus_size: number;
    categories: number;
    categories_explored: number;
    attempts: number;
  };
}

export interface GradeResult {
  correct: boolean;
  method: string;
  similarity: number | null;
  first_solve: boolean;
  points_awarded: number;
}

export interface SubmitResponse {
  grade: GradeResult;
  new_badges: string[];
  dashboard: Dashboard;
}

export interface SimilarityHistogram {
  bin_width: number;
  bins: number[];
  n: number;
  mean: number;
  mode_bin: [number, number];
}

export interface DimensionMetrics {
  k_total: number;
  effective_categories: number;
  entropy_bits: number;
  concentration_index: number | null;
  sample_size: number;
}

export interface QualityReport {
  per_dimension: Record<string, DimensionMetrics>;
  pairwise_cramers_v: number[][];
  bloom_difficulty_counts: number[][];
  qa_similarity: SimilarityHistogram | null;
  generated_at: string;
}

export interface CategorySummary {
  attempts: number;
  accuracy: number;
  completion_rate: number;
  median_time_to_solution_ms: number;
}

export interface AnalyticsReport {
  overall: CategorySummary;
  per_category: Record<string, CategorySummary>;
}

export interface UploadIssue {
  record_index: number;
  field: string;
  code: string;
  message: string;
}

export interface UploadResult {
  accepted: number;
  rejected: number;
  issues: UploadIssue[];
}
