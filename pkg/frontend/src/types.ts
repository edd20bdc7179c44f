export type Dimension = 'pc' | 'ae';

export type HumanDecision = 'accept' | 'reject';

/** Card verdict lifecycle. A settled or failed card may re-enter `saving`
 * on resubmission; `saving` itself accepts no new submissions. */
export type VerdictState = 'unreviewed' | 'saving' | 'accepted' | 'rejected' | 'save-failed';

export interface VerdictPayload {
  verdict_id: string;
  para_id: string;
  dimension: Dimension;
  human_decision: HumanDecision;
  coder_id: string;
  timestamp: string;
  model_decision_at_time: number;
}

export interface ShortlistItem {
  para_id: string;
  dimension: Dimension;
  positive_votes: number;
  mean_score: number;
  votes: Record<string, number>;
  model_decision: number;
  near_miss: boolean;
  text: string;
  doc_id: string;
  party: string;
  year: number;
  register: string;
  verdict: VerdictPayload | null;
}

export interface ShortlistPage {
  items: ShortlistItem[];
  total: number;
  next_cursor: string | null;
}

export interface DimensionProgress {
  total: number;
  reviewed: number;
}

export type Progress = Record<Dimension, DimensionProgress>;

export interface VerdictResponse extends VerdictPayload {
  progress: Progress;
}

export interface ExportResponse {
  session_id: string;
  path: string;
  count: number;
}

/** Client-side view model for one shortlist entry. */
export interface ReviewCard {
  paraId: string;
  dimension: Dimension;
  text: string;
  party: string;
  year: number;
  register: string;
  votes: Record<string, number>;
  positiveVotes: number;
  meanScore: number;
  modelDecision: number;
  nearMiss: boolean;
  state: VerdictState;
  /** decision shown optimistically while saving, kept for retry on failure */
  pendingDecision: HumanDecision | null;
  lastError: string | null;
}
