/**
 * Client-side draft session: five ally slots, five enemy slots, explicit
 * bans, the selected what-if candidate, and the last snapshot version seen.
 *
 * All updates are pure; the UI layer owns the single mutable reference.
 * The service is what ranks and scores — this module only tracks state and
 * projects it into the request payload the service expects.
 */
import type { DraftRequest } from "./api.js";

export const ALLY_SLOTS = 5;
export const ENEMY_SLOTS = 5;

/**
 * The service scores a draft of up to four teammates; the fifth ally slot is
 * your own pick, which completes the team and ends the draft.
 */
export const MAX_REQUEST_ALLIES = 4;

export type Side = "ally" | "enemy";

export interface DraftSession {
  allies: (string | null)[];
  enemies: (string | null)[];
  banned: string[];
  whatIfCandidate: string | null;
  lastSnapshotVersion: number | null;
}

export function newSession(): DraftSession {
  return {
    allies: Array(ALLY_SLOTS).fill(null),
    enemies: Array(ENEMY_SLOTS).fill(null),
    banned: [],
    whatIfCandidate: null,
    lastSnapshotVersion: null,
  };
}

export function filledAllies(session: DraftSession): string[] {
  return session.allies.filter((id): id is string => id !== null);
}

export function filledEnemies(session: DraftSession): string[] {
  return session.enemies.filter((id): id is string => id !== null);
}

/** Every id that can no longer be suggested: picks on both sides plus bans. */
export function unavailableIds(session: DraftSession): Set<string> {
  return new Set([...filledAllies(session), ...filledEnemies(session), ...session.banned]);
}

/**
 * Set or clear one slot. Rejects an id already used elsewhere so the session
 * never reaches a state the service would refuse.
 */
export function withSlot(
  session: DraftSession,
  side: Side,
  index: number,
  id: string | null,
): DraftSession {
  const slots = side === "ally" ? session.allies : session.enemies;
  if (index < 0 || index >= slots.length) {
    throw new Error(`no ${side} slot ${index}`);
  }
  if (id !== null && unavailableIds(session).has(id) && slots[index] !== id) {
    throw new Error(`${id} is already picked or banned`);
  }
  const next = slots.slice();
  next[index] = id;
  return side === "ally"
    ? { ...session, allies: next }
    : { ...session, enemies: next };
}

/** Fill the first free ally slot with a suggested candidate. */
export function withPick(session: DraftSession, id: string): DraftSession {
  const index = session.allies.indexOf(null);
  if (index === -1) {
    throw new Error("all ally slots are filled");
  }
  return withSlot(session, "ally", index, id);
}

export function withBan(session: DraftSession, id: string): DraftSession {
  if (unavailableIds(session).has(id)) return session;
  return { ...session, banned: [...session.banned, id] };
}

export function withoutBan(session: DraftSession, id: string): DraftSession {
  return { ...session, banned: session.banned.filter((b) => b !== id) };
}

export function withWhatIf(session: DraftSession, id: string | null): DraftSession {
  return { ...session, whatIfCandidate: id };
}

export function withSnapshotVersion(session: DraftSession, version: number): DraftSession {
  return { ...session, lastSnapshotVersion: version };
}

/** True once a response reports a different snapshot than the session saw. */
export function isStale(session: DraftSession, version: number): boolean {
  return session.lastSnapshotVersion !== null && version !== session.lastSnapshotVersion;
}

/** True when the team is full and there is nothing left to recommend. */
export function teamComplete(session: DraftSession): boolean {
  return filledAllies(session).length >= ALLY_SLOTS;
}

/**
 * Project the session into the request payload. Only the slots that are
 * actually filled are sent; bans travel in `unavailable`.
 */
export function toDraftRequest(session: DraftSession): DraftRequest {
  return {
    allies: filledAllies(session),
    enemies: filledEnemies(session),
    unavailable: [...session.banned].sort(),
  };
}
