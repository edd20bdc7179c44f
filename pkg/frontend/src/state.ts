import type { ShortlistQuery } from './api.js';
import type {
  Dimension,
  HumanDecision,
  Progress,
  ReviewCard,
  ShortlistItem,
  ShortlistPage,
  VerdictResponse,
  VerdictState,
} from './types.js';

/** The service surface the queue needs; ApiClient satisfies it. */
export interface ReviewApi {
  getShortlist(sessionId: string, query?: ShortlistQuery): Promise<ShortlistPage>;
  getProgress(sessionId: string): Promise<Progress>;
  postVerdict(
    sessionId: string,
    paraId: string,
    dimension: Dimension,
    decision: HumanDecision,
    coderId: string,
  ): Promise<VerdictResponse>;
}

export type SubmitOutcome = 'saved' | 'in-flight' | 'failed';

/** Cards are built from service rows verbatim: every vote, score and text
 * shown on screen comes from one shortlist item, unmodified. */
export function cardFromItem(item: ShortlistItem): ReviewCard {
  let state: VerdictState = 'unreviewed';
  if (item.verdict) {
    state = item.verdict.human_decision === 'accept' ? 'accepted' : 'rejected';
  }
  return {
    paraId: item.para_id,
    dimension: item.dimension,
    text: item.text,
    party: item.party,
    year: item.year,
    register: item.register,
    votes: item.votes,
    positiveVotes: item.positive_votes,
    meanScore: item.mean_score,
    modelDecision: item.model_decision,
    nearMiss: item.near_miss,
    state,
    pendingDecision: item.verdict ? item.verdict.human_decision : null,
    lastError: null,
  };
}

export interface QueueOptions {
  dimension?: Dimension;
  pageSize?: number;
}

/** Client-side queue over one review session.
 *
 * Pages load in shortlist order; verdicts submit optimistically with a
 * single request in flight per card (double submissions are dropped), and
 * failures park the card in `save-failed` for retry.
 */
export class ReviewQueue {
  readonly cards: ReviewCard[] = [];
  progress: Progress = {
    pc: { total: 0, reviewed: 0 },
    ae: { total: 0, reviewed: 0 },
  };
  total = 0;
  focusIndex = 0;
  banner: string | null = null;

  private nextCursor: string | null = null;
  private started = false;
  private listeners: Array<() => void> = [];

  constructor(
    private readonly api: ReviewApi,
    readonly sessionId: string,
    readonly coderId: string,
    private readonly options: QueueOptions = {},
  ) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  get hasMore(): boolean {
    return !this.started || this.nextCursor !== null;
  }

  /** Load the next shortlist page; safe to call repeatedly. */
  async loadMore(): Promise<number> {
    if (!this.hasMore) return 0;
    let page;
    try {
      page = await this.api.getShortlist(this.sessionId, {
        dim: this.options.dimension,
        cursor: this.nextCursor ?? undefined,
        limit: this.options.pageSize ?? 20,
        coder: this.coderId,
      });
    } catch (err) {
      this.banner = `Could not load the queue: ${String(
        err instanceof Error ? err.message : err,
      )}. Retry when the service is reachable.`;
      this.notify();
      throw err;
    }
    this.started = true;
    this.nextCursor = page.next_cursor;
    this.total = page.total;
    for (const item of page.items) this.cards.push(cardFromItem(item));
    this.banner = null;
    this.notify();
    return page.items.length;
  }

  async refreshProgress(): Promise<void> {
    this.progress = await this.api.getProgress(this.sessionId);
    this.notify();
  }

  focus(index: number): void {
    if (this.cards.length === 0) return;
    this.focusIndex = Math.min(Math.max(index, 0), this.cards.length - 1);
    this.notify();
  }

  next(): void {
    this.focus(this.focusIndex + 1);
  }

  previous(): void {
    this.focus(this.focusIndex - 1);
  }

  /** Submit a verdict for one card. Returns 'in-flight' when a save for
   * the card is already running (dedup: one POST per card at a time). */
  async submit(index: number, decision: HumanDecision): Promise<SubmitOutcome> {
    const card = this.cards[index];
    if (!card) throw new Error(`no card at index ${index}`);
    if (card.state === 'saving') return 'in-flight';

    card.state = 'saving';
    card.pendingDecision = decision;
    card.lastError = null;
    this.notify();

    try {
      const response = await this.api.postVerdict(
        this.sessionId,
        card.paraId,
        card.dimension,
        decision,
        this.coderId,
      );
      card.state = decision === 'accept' ? 'accepted' : 'rejected';
      this.progress = response.progress;
      this.notify();
      return 'saved';
    } catch (err) {
      card.state = 'save-failed';
      card.lastError = err instanceof Error ? err.message : String(err);
      this.notify();
      return 'failed';
    }
  }

  /** Re-submit the decision a failed card was trying to save. */
  async retry(index: number): Promise<SubmitOutcome> {
    const card = this.cards[index];
    if (!card) throw new Error(`no card at index ${index}`);
    if (card.state !== 'save-failed' || card.pendingDecision === null) {
      return 'in-flight';
    }
    return this.submit(index, card.pendingDecision);
  }
}
