export type ReviewAction = 'accept' | 'reject' | 'next' | 'previous' | 'retry';

/** Structural subset of KeyboardEvent so the mapping is testable headless. */
export interface KeyLike {
  key: string;
  ctrlKey?: boolean;
  metaKey?: boolean;
  altKey?: boolean;
  targetIsTextInput?: boolean;
}

const BINDINGS: Record<string, ReviewAction> = {
  a: 'accept',
  r: 'reject',
  j: 'next',
  arrowright: 'next',
  k: 'previous',
  arrowleft: 'previous',
  enter: 'retry',
};

/** Map a key press to a review action; null when the key is unbound,
 * modified, or typed into a text field. */
export function mapKey(event: KeyLike): ReviewAction | null {
  if (event.ctrlKey || event.metaKey || event.altKey) return null;
  if (event.targetIsTextInput) return null;
  return BINDINGS[event.key.toLowerCase()] ?? null;
}
