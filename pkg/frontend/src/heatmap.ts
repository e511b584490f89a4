/**
 * Read-only pair-synergy heatmap over the snapshot's element pool.
 * Cell colors scale with |synergy|; pairs the log never saw stay blank.
 */
import type { MatrixEntry, MatrixResponse } from "./api.js";
import { clear, el, formatScore } from "./dom.js";

function pairKey(a: string, b: string): string {
  return a <= b ? `${a}|${b}` : `${b}|${a}`;
}

function cellFor(entry: MatrixEntry | undefined, maxAbs: number): HTMLTableCellElement {
  const cell = el("td", "cell");
  if (entry === undefined) {
    cell.className = "cell missing";
    cell.textContent = "·";
    return cell;
  }
  const value = entry.synergy;
  cell.classList.add(value < 0 ? "negative" : "positive");
  if (!entry.sufficient_games) cell.classList.add("insufficient");
  cell.dataset.synergy = formatScore(value);
  cell.textContent = formatScore(value);
  cell.title =
    `${entry.pair.join(" + ")}: synergy ${formatScore(value)} ` +
    `(${entry.joint.games} games)`;
  const strength = maxAbs > 0 ? Math.abs(value) / maxAbs : 0;
  cell.style.opacity = String(0.25 + 0.75 * strength);
  return cell;
}

export function renderHeatmap(container: HTMLElement, matrix: MatrixResponse): void {
  clear(container);

  const byPair = new Map<string, MatrixEntry>();
  let maxAbs = 0;
  for (const entry of matrix.entries) {
    const [a, b] = entry.pair;
    byPair.set(pairKey(a ?? "", b ?? ""), entry);
    maxAbs = Math.max(maxAbs, Math.abs(entry.synergy));
  }

  const caption = el("p", "heatmap-caption");
  caption.textContent =
    `Pair synergy, ${matrix.baseline} baseline, ` +
    `min ${matrix.min_games} games for full confidence`;
  container.appendChild(caption);

  const table = el("table", "heatmap");
  const head = el("tr");
  head.appendChild(el("th"));
  for (const id of matrix.pool) {
    head.appendChild(el("th", undefined, id));
  }
  table.appendChild(head);

  for (const row of matrix.pool) {
    const tr = el("tr");
    tr.appendChild(el("th", undefined, row));
    for (const col of matrix.pool) {
      if (row === col) {
        tr.appendChild(el("td", "cell diagonal"));
        continue;
      }
      const cell = cellFor(byPair.get(pairKey(row, col)), maxAbs);
      cell.dataset.pair = pairKey(row, col);
      tr.appendChild(cell);
    }
    table.appendChild(tr);
  }
  container.appendChild(table);
}
