/**
 * What-if panel: the projected score for a hypothetical pick, broken down
 * into one contribution bar per ally and per enemy.
 */
import type { Contribution, WhatIfResponse } from "./api.js";
import { clear, el, formatScore } from "./dom.js";

function contributionBar(c: Contribution, maxAbs: number): HTMLElement {
  const row = el("div", "contribution");
  row.dataset.other = c.other;
  row.dataset.value = formatScore(c.value);

  const label = el("span", "contribution-label", c.other);
  row.appendChild(label);

  const track = el("span", "bar-track");
  const bar = el("span", `bar ${c.value < 0 ? "negative" : "positive"}`);
  // bar length is presentation only; the number shown is the service value
  const pct = maxAbs > 0 ? (Math.abs(c.value) / maxAbs) * 100 : 0;
  bar.style.width = `${pct}%`;
  track.appendChild(bar);
  row.appendChild(track);

  row.appendChild(el("span", "contribution-value", formatScore(c.value)));
  if (!c.known) {
    row.appendChild(el("span", "badge no-data", "no data"));
  } else if (!c.sufficient_games) {
    row.appendChild(el("span", "badge low-confidence", "low confidence"));
  }
  return row;
}

function contributionSection(
  title: string,
  className: string,
  contributions: Contribution[],
  maxAbs: number,
): HTMLElement {
  const section = el("div", `contributions ${className}`);
  section.appendChild(el("h4", undefined, title));
  if (contributions.length === 0) {
    section.appendChild(el("p", "contributions-empty", "none yet"));
  }
  for (const c of contributions) {
    section.appendChild(contributionBar(c, maxAbs));
  }
  return section;
}

export function renderWhatIf(container: HTMLElement, resp: WhatIfResponse): void {
  clear(container);
  const rec = resp.recommendation;

  const header = el("div", "whatif-header");
  header.appendChild(el("h3", undefined, `What if: ${rec.candidate}`));
  const score = el("span", "whatif-score", formatScore(rec.total_score));
  score.dataset.score = formatScore(rec.total_score);
  header.appendChild(score);
  if (rec.low_confidence) {
    header.appendChild(el("span", "badge low-confidence", "low confidence"));
  }
  container.appendChild(header);

  const all = [...resp.ally_contributions, ...resp.enemy_contributions];
  const maxAbs = all.reduce((m, c) => Math.max(m, Math.abs(c.value)), 0);
  container.appendChild(
    contributionSection("Ally synergy", "allies", resp.ally_contributions, maxAbs),
  );
  container.appendChild(
    contributionSection("Counter edge", "enemies", resp.enemy_contributions, maxAbs),
  );

  const team = el("p", "projected-team");
  team.textContent = `Projected team: ${resp.projected_allies.join(", ")}`;
  container.appendChild(team);
}

/** A rejected what-if (e.g. unavailable candidate) is shown inline. */
export function renderWhatIfError(container: HTMLElement, message: string): void {
  clear(container);
  container.appendChild(el("p", "whatif-error", message));
}
