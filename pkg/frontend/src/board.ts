/**
 * Draft board views: pick slots on both sides, the banned list, and the
 * ranked suggestion list with expandable score breakdowns.
 */
import type { Recommendation } from "./api.js";
import { clear, el, formatScore } from "./dom.js";
import {
  ALLY_SLOTS,
  ENEMY_SLOTS,
  DraftSession,
  Side,
  unavailableIds,
} from "./session.js";

export interface SlotCallbacks {
  onSlotChange(side: Side, index: number, id: string | null): void;
  onUnban(id: string): void;
}

export interface RecommendationCallbacks {
  onPick(id: string): void;
  onWhatIf(id: string): void;
  onBan(id: string): void;
}

function slotSelect(
  session: DraftSession,
  pool: string[],
  side: Side,
  index: number,
  cb: SlotCallbacks,
): HTMLSelectElement {
  const slots = side === "ally" ? session.allies : session.enemies;
  const current = slots[index] ?? null;
  const taken = unavailableIds(session);
  const select = el("select", "slot");
  select.dataset.side = side;
  select.dataset.index = String(index);
  select.appendChild(el("option", undefined, "—")).setAttribute("value", "");
  for (const id of pool) {
    const option = el("option", undefined, id);
    option.value = id;
    // ids used elsewhere stay visible but cannot be picked twice
    option.disabled = taken.has(id) && id !== current;
    select.appendChild(option);
  }
  select.value = current ?? "";
  select.addEventListener("change", () => {
    cb.onSlotChange(side, index, select.value === "" ? null : select.value);
  });
  return select;
}

function slotColumn(
  session: DraftSession,
  pool: string[],
  side: Side,
  count: number,
  cb: SlotCallbacks,
): HTMLElement {
  const column = el("div", `slot-column ${side}`);
  column.appendChild(el("h3", undefined, side === "ally" ? "Your team" : "Enemy team"));
  for (let i = 0; i < count; i++) {
    const row = el("label", "slot-row");
    row.appendChild(el("span", "slot-label", `${i + 1}`));
    row.appendChild(slotSelect(session, pool, side, i, cb));
    column.appendChild(row);
  }
  return column;
}

export function renderSlots(
  container: HTMLElement,
  session: DraftSession,
  pool: string[],
  cb: SlotCallbacks,
): void {
  clear(container);
  const columns = el("div", "slot-columns");
  columns.appendChild(slotColumn(session, pool, "ally", ALLY_SLOTS, cb));
  columns.appendChild(slotColumn(session, pool, "enemy", ENEMY_SLOTS, cb));
  container.appendChild(columns);

  const bans = el("div", "bans");
  bans.appendChild(el("span", "bans-label", "Banned:"));
  if (session.banned.length === 0) {
    bans.appendChild(el("span", "bans-empty", "none"));
  }
  for (const id of session.banned) {
    const chip = el("button", "ban-chip", `${id} ✕`);
    chip.dataset.id = id;
    chip.addEventListener("click", () => cb.onUnban(id));
    bans.appendChild(chip);
  }
  container.appendChild(bans);
}

function breakdownRow(label: string, value: number): HTMLElement {
  const row = el("div", "breakdown-row");
  row.appendChild(el("span", "breakdown-label", label));
  row.appendChild(el("span", "breakdown-value", formatScore(value)));
  return row;
}

function recommendationEntry(
  rec: Recommendation,
  cb: RecommendationCallbacks,
): HTMLElement {
  const entry = el("details", "rec");
  entry.dataset.candidate = rec.candidate;
  entry.dataset.score = formatScore(rec.total_score);

  const summary = el("summary", "rec-summary");
  summary.appendChild(el("span", "rec-candidate", rec.candidate));
  summary.appendChild(el("span", "rec-score", formatScore(rec.total_score)));
  if (rec.low_confidence) {
    summary.appendChild(el("span", "badge low-confidence", "low confidence"));
  }
  entry.appendChild(summary);

  const body = el("div", "rec-body");
  body.appendChild(breakdownRow("ally synergy", rec.ally_component));
  body.appendChild(breakdownRow("counter edge", rec.counter_component));

  const actions = el("div", "rec-actions");
  const pick = el("button", "pick", "Pick");
  pick.addEventListener("click", () => cb.onPick(rec.candidate));
  const whatIf = el("button", "what-if", "What if?");
  whatIf.addEventListener("click", () => cb.onWhatIf(rec.candidate));
  const ban = el("button", "ban", "Ban");
  ban.addEventListener("click", () => cb.onBan(rec.candidate));
  actions.appendChild(pick);
  actions.appendChild(whatIf);
  actions.appendChild(ban);
  body.appendChild(actions);
  entry.appendChild(body);
  return entry;
}

export function renderRecommendations(
  container: HTMLElement,
  recs: Recommendation[],
  cb: RecommendationCallbacks,
): void {
  clear(container);
  if (recs.length === 0) {
    container.appendChild(el("p", "recs-empty", "No candidates available."));
    return;
  }
  const list = el("div", "recs-list");
  for (const rec of recs) {
    list.appendChild(recommendationEntry(rec, cb));
  }
  container.appendChild(list);
}

export function renderTeamComplete(container: HTMLElement): void {
  clear(container);
  container.appendChild(el("p", "recs-complete", "Team complete — good luck out there."));
}
