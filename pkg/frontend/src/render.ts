import { RUBRIC, SHORTCUT_LEGEND } from './rubric.js';
import type { ReviewQueue } from './state.js';
import type { Dimension, ReviewCard } from './types.js';

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

const STATE_LABEL: Record<ReviewCard['state'], string> = {
  unreviewed: 'unreviewed',
  saving: 'saving…',
  accepted: 'accepted',
  rejected: 'rejected',
  'save-failed': 'save failed',
};

function renderVotes(card: ReviewCard): HTMLElement {
  const wrap = el('div', 'votes');
  for (const [kind, vote] of Object.entries(card.votes)) {
    const chip = el('span', `vote vote-${vote ? 'pos' : 'neg'}`, kind);
    chip.title = `${kind}: ${vote ? 'positive' : 'negative'}`;
    wrap.appendChild(chip);
  }
  wrap.appendChild(
    el('span', 'vote-summary',
       `${card.positiveVotes}/5 votes · mean score ${card.meanScore.toFixed(3)}`),
  );
  return wrap;
}

function renderCard(card: ReviewCard, focused: boolean): HTMLElement {
  const root = el('article', `card state-${card.state}${focused ? ' focused' : ''}`);
  root.dataset.paraId = card.paraId;
  root.dataset.dimension = card.dimension;

  const header = el('header');
  header.appendChild(el('span', 'dim', card.dimension.toUpperCase()));
  header.appendChild(
    el('span', 'context', `${card.party} · ${card.year} · ${card.register}`),
  );
  if (card.nearMiss) header.appendChild(el('span', 'near-miss', 'near miss'));
  header.appendChild(el('span', `status status-${card.state}`, STATE_LABEL[card.state]));
  root.appendChild(header);

  root.appendChild(el('p', 'text', card.text));
  root.appendChild(renderVotes(card));

  if (card.state === 'save-failed' && card.lastError) {
    const banner = el('div', 'error-banner');
    banner.appendChild(el('span', undefined, `Save failed: ${card.lastError}`));
    const retry = el('button', 'retry', 'retry');
    retry.dataset.action = 'retry';
    banner.appendChild(retry);
    root.appendChild(banner);
  }

  const actions = el('div', 'actions');
  for (const [action, label] of [['accept', 'accept (a)'], ['reject', 'reject (r)']] as const) {
    const button = el('button', action, label);
    button.dataset.action = action;
    button.disabled = card.state === 'saving';
    actions.appendChild(button);
  }
  root.appendChild(actions);
  return root;
}

function renderProgress(queue: ReviewQueue): HTMLElement {
  const wrap = el('div', 'progress');
  for (const dimension of ['pc', 'ae'] as Dimension[]) {
    const { reviewed, total } = queue.progress[dimension];
    const line = el('div', 'progress-line');
    line.appendChild(el('span', 'progress-label', dimension.toUpperCase()));
    const bar = el('div', 'bar');
    const fill = el('div', 'fill');
    fill.style.width = total > 0 ? `${(100 * reviewed) / total}%` : '0%';
    bar.appendChild(fill);
    line.appendChild(bar);
    line.appendChild(el('span', 'progress-count', `${reviewed}/${total}`));
    wrap.appendChild(line);
  }
  return wrap;
}

function renderRubric(): HTMLElement {
  const aside = el('aside', 'rubric');
  aside.appendChild(el('h2', undefined, 'Coding rubric'));
  for (const section of [RUBRIC.pc, RUBRIC.ae]) {
    aside.appendChild(el('h3', undefined, section.title));
    const list = el('ul');
    for (const point of section.points) list.appendChild(el('li', undefined, point));
    aside.appendChild(list);
  }
  aside.appendChild(el('h3', undefined, 'Shortcuts'));
  const legend = el('ul', 'legend');
  for (const [key, what] of SHORTCUT_LEGEND) {
    const item = el('li');
    item.appendChild(el('kbd', undefined, key));
    item.appendChild(document.createTextNode(` ${what}`));
    legend.appendChild(item);
  }
  aside.appendChild(legend);
  return aside;
}

/** Redraw the whole queue view into `root`. */
export function renderQueue(root: HTMLElement, queue: ReviewQueue): void {
  root.replaceChildren();

  root.appendChild(renderProgress(queue));
  if (queue.banner) {
    const banner = el('div', 'error-banner global');
    banner.appendChild(el('span', undefined, queue.banner));
    const retry = el('button', 'retry', 'retry');
    retry.dataset.action = 'reload';
    banner.appendChild(retry);
    root.appendChild(banner);
  }

  const layout = el('div', 'layout');
  const list = el('section', 'cards');
  if (queue.cards.length === 0 && !queue.hasMore) {
    list.appendChild(el('p', 'empty', 'Nothing to review in this queue.'));
  }
  queue.cards.forEach((card, index) => {
    const node = renderCard(card, index === queue.focusIndex);
    node.dataset.index = String(index);
    list.appendChild(node);
  });
  if (queue.hasMore && queue.cards.length > 0) {
    const more = el('button', 'load-more', 'load more');
    more.dataset.action = 'load-more';
    list.appendChild(more);
  }
  layout.appendChild(list);
  layout.appendChild(renderRubric());
  root.appendChild(layout);

  const focused = list.querySelector('.card.focused');
  if (focused) focused.scrollIntoView({ block: 'nearest' });
}
