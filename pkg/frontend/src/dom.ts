/** Tiny DOM helpers shared by the view modules. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/**
 * Exact decimal rendering of a service-provided number. The UI never
 * recomputes scores, so the text shown is the round-trippable form of the
 * value the service returned.
 */
export function formatScore(value: number): string {
  return String(value);
}

export function clear(node: HTMLElement): void {
  node.textContent = "";
}
