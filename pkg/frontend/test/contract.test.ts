/** Contract tests against responses recorded from the real service:
 * everything a card displays must be byte-traceable to a service payload. */

import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { describe, expect, it } from 'vitest';

import { ReviewQueue, cardFromItem, type ReviewApi } from '../src/state.js';
import type { Progress, ShortlistItem, ShortlistPage } from '../src/types.js';

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), 'fixtures');

const recordedPage = JSON.parse(
  readFileSync(join(FIXTURES, 'shortlist-page.json'), 'utf-8'),
) as ShortlistPage;
const recordedProgress = JSON.parse(
  readFileSync(join(FIXTURES, 'progress.json'), 'utf-8'),
) as { progress: Progress };

class RecordedApi implements ReviewApi {
  async getShortlist(): Promise<ShortlistPage> {
    return structuredClone(recordedPage);
  }

  async getProgress(): Promise<Progress> {
    return structuredClone(recordedProgress.progress);
  }

  postVerdict(): never {
    throw new Error('contract fixture is read-only');
  }
}

describe('recorded shortlist page', () => {
  it('has the documented page shape', () => {
    expect(recordedPage).toHaveProperty('items');
    expect(recordedPage).toHaveProperty('total');
    expect(recordedPage).toHaveProperty('next_cursor');
    expect(recordedPage.items.length).toBeGreaterThan(0);
  });

  it('ranks by votes then mean score', () => {
    const keys = recordedPage.items.map(
      (i) => [i.positive_votes, i.mean_score] as const,
    );
    const sorted = [...keys].sort((a, b) => b[0] - a[0] || b[1] - a[1]);
    expect(keys).toEqual(sorted);
  });
});

describe('card construction never invents values', () => {
  it('copies every displayed field verbatim from the payload', () => {
    for (const item of recordedPage.items) {
      const card = cardFromItem(item);
      expect(card.paraId).toBe(item.para_id);
      expect(card.dimension).toBe(item.dimension);
      expect(card.text).toBe(item.text);
      expect(card.party).toBe(item.party);
      expect(card.year).toBe(item.year);
      expect(card.register).toBe(item.register);
      expect(card.positiveVotes).toBe(item.positive_votes);
      expect(card.meanScore).toBe(item.mean_score);
      expect(card.modelDecision).toBe(item.model_decision);
      // vote map compared byte-for-byte through JSON
      expect(JSON.stringify(card.votes)).toBe(JSON.stringify(item.votes));
      expect(Object.keys(card.votes).sort()).toEqual(
        ['gnb', 'knn', 'logreg', 'mlp', 'svm'],
      );
    }
  });

  it('only flagged entries appear and each vote agrees with the count', () => {
    for (const item of recordedPage.items) {
      const voteSum = Object.values(item.votes).reduce((a, b) => a + b, 0);
      expect(voteSum).toBe(item.positive_votes);
      expect(item.model_decision).toBe(1);
      expect(item.near_miss).toBe(false);
    }
  });
});

describe('queue over recorded responses', () => {
  it('binds progress straight from the service payload', async () => {
    const queue = new ReviewQueue(new RecordedApi(), 'fixture-session', 'coder');
    await queue.loadMore();
    await queue.refreshProgress();
    expect(queue.progress).toEqual(recordedProgress.progress);
    expect(queue.cards).toHaveLength(recordedPage.items.length);
    expect(queue.total).toBe(recordedPage.total);
    for (const card of queue.cards) expect(card.state).toBe('unreviewed');
  });
});

describe('verdict echo restores state', () => {
  it('maps echoed verdicts onto card states', () => {
    const reviewed: ShortlistItem = {
      ...recordedPage.items[0],
      verdict: {
        verdict_id: 'x',
        para_id: recordedPage.items[0].para_id,
        dimension: recordedPage.items[0].dimension,
        human_decision: 'accept',
        coder_id: 'coder',
        timestamp: '2026-01-01T00:00:00+00:00',
        model_decision_at_time: 1,
      },
    };
    expect(cardFromItem(reviewed).state).toBe('accepted');
  });
});
