import { ApiClient } from './api.js';
import { mapKey } from './keyboard.js';
import { renderQueue } from './render.js';
import { ReviewQueue } from './state.js';
import type { Dimension } from './types.js';

function readSettings() {
  const params = new URLSearchParams(window.location.search);
  return {
    session: params.get('session'),
    coder: params.get('coder') ?? localStorage.getItem('paracode-coder') ?? '',
    dimension: (params.get('dim') as Dimension | null) ?? undefined,
    token: params.get('token') ?? localStorage.getItem('paracode-token'),
  };
}

async function pickSession(api: ApiClient, requested: string | null): Promise<string | null> {
  if (requested) return requested;
  const sessions = await api.listSessions();
  return sessions.length > 0 ? sessions[sessions.length - 1] : null;
}

async function boot(): Promise<void> {
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app mount point');

  const settings = readSettings();
  const api = new ApiClient('', settings.token);

  let coder = settings.coder;
  while (!coder) {
    coder = window.prompt('Coder id for this session:')?.trim() ?? '';
  }
  localStorage.setItem('paracode-coder', coder);

  const sessionId = await pickSession(api, settings.session);
  if (!sessionId) {
    root.textContent = 'No review sessions found. Create one with: paracode shortlist';
    return;
  }

  const queue = new ReviewQueue(api, sessionId, coder, {
    dimension: settings.dimension,
    pageSize: 20,
  });
  queue.onChange(() => renderQueue(root, queue));

  const act = (action: string, index: number) => {
    switch (action) {
      case 'accept':
      case 'reject':
        void queue.submit(index, action);
        break;
      case 'retry':
        void queue.retry(index);
        break;
      case 'next':
        queue.next();
        break;
      case 'previous':
        queue.previous();
        break;
      case 'load-more':
      case 'reload':
        void queue.loadMore();
        break;
    }
  };

  root.addEventListener('click', (event) => {
    const button = (event.target as HTMLElement).closest('button[data-action]');
    if (!(button instanceof HTMLButtonElement)) return;
    const card = button.closest('[data-index]');
    const index = card ? Number((card as HTMLElement).dataset.index) : queue.focusIndex;
    act(button.dataset.action as string, index);
  });

  document.addEventListener('keydown', (event) => {
    const action = mapKey({
      key: event.key,
      ctrlKey: event.ctrlKey,
      metaKey: event.metaKey,
      altKey: event.altKey,
      targetIsTextInput:
        event.target instanceof HTMLInputElement ||
        event.target instanceof HTMLTextAreaElement,
    });
    if (!action) return;
    event.preventDefault();
    act(action, queue.focusIndex);
    if (action === 'accept' || action === 'reject') queue.next();
  });

  await queue.loadMore();
  await queue.refreshProgress();
}

void boot();
