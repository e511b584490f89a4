import { describe, expect, it } from "vitest";
import {
  ALLY_SLOTS,
  ENEMY_SLOTS,
  filledAllies,
  filledEnemies,
  isStale,
  newSession,
  teamComplete,
  toDraftRequest,
  unavailableIds,
  withBan,
  withoutBan,
  withPick,
  withSlot,
  withSnapshotVersion,
  withWhatIf,
} from "../src/session.js";

describe("new session", () => {
  it("starts empty", () => {
    const s = newSession();
    expect(s.allies).toEqual([null, null, null, null, null]);
    expect(s.enemies).toHaveLength(ENEMY_SLOTS);
    expect(s.banned).toEqual([]);
    expect(s.whatIfCandidate).toBeNull();
    expect(s.lastSnapshotVersion).toBeNull();
  });

  it("projects to an empty draft request", () => {
    expect(toDraftRequest(newSession())).toEqual({
      allies: [],
      enemies: [],
      unavailable: [],
    });
  });
});

describe("slot edits", () => {
  it("fills and clears a slot without mutating the original", () => {
    const s0 = newSession();
    const s1 = withSlot(s0, "ally", 0, "a");
    expect(s1.allies[0]).toBe("a");
    expect(s0.allies[0]).toBeNull();
    const s2 = withSlot(s1, "ally", 0, null);
    expect(s2.allies[0]).toBeNull();
  });

  it("tracks enemies separately from allies", () => {
    let s = newSession();
    s = withSlot(s, "ally", 0, "a");
    s = withSlot(s, "enemy", 2, "e");
    expect(filledAllies(s)).toEqual(["a"]);
    expect(filledEnemies(s)).toEqual(["e"]);
  });

  it("rejects an id already used in another slot", () => {
    const s = withSlot(newSession(), "ally", 0, "a");
    expect(() => withSlot(s, "ally", 1, "a")).toThrow(/already/);
    expect(() => withSlot(s, "enemy", 0, "a")).toThrow(/already/);
  });

  it("allows re-selecting the same id into its own slot", () => {
    const s = withSlot(newSession(), "ally", 0, "a");
    expect(withSlot(s, "ally", 0, "a").allies[0]).toBe("a");
  });

  it("rejects out-of-range slots", () => {
    expect(() => withSlot(newSession(), "ally", ALLY_SLOTS, "a")).toThrow(/slot/);
    expect(() => withSlot(newSession(), "enemy", -1, "a")).toThrow(/slot/);
  });
});

describe("picking from suggestions", () => {
  it("fills the first free ally slot", () => {
    let s = withSlot(newSession(), "ally", 1, "b");
    s = withPick(s, "a");
    expect(s.allies.slice(0, 2)).toEqual(["a", "b"]);
  });

  it("fails once the team is full", () => {
    let s = newSession();
    for (const [i, id] of ["a", "b", "c", "d", "e"].entries()) {
      s = withSlot(s, "ally", i, id);
    }
    expect(teamComplete(s)).toBe(true);
    expect(() => withPick(s, "f")).toThrow(/filled/);
  });

  it("team is not complete with four allies", () => {
    let s = newSession();
    for (const [i, id] of ["a", "b", "c", "d"].entries()) {
      s = withSlot(s, "ally", i, id);
    }
    expect(teamComplete(s)).toBe(false);
  });
});

describe("bans", () => {
  it("adds and removes bans", () => {
    let s = withBan(newSession(), "g");
    expect(s.banned).toEqual(["g"]);
    s = withoutBan(s, "g");
    expect(s.banned).toEqual([]);
  });

  it("is idempotent for an id that is already unavailable", () => {
    const s = withBan(withBan(newSession(), "g"), "g");
    expect(s.banned).toEqual(["g"]);
  });

  it("banned ids cannot be slotted", () => {
    const s = withBan(newSession(), "g");
    expect(() => withSlot(s, "ally", 0, "g")).toThrow(/banned/);
  });

  it("unavailable covers picks on both sides plus bans", () => {
    let s = withBan(newSession(), "g");
    s = withSlot(s, "ally", 0, "a");
    s = withSlot(s, "enemy", 0, "e");
    expect(unavailableIds(s)).toEqual(new Set(["a", "e", "g"]));
  });
});

describe("draft request projection", () => {
  it("sends only filled slots and sorted bans", () => {
    let s = newSession();
    s = withSlot(s, "ally", 3, "a");
    s = withSlot(s, "enemy", 1, "e");
    s = withBan(withBan(s, "j"), "g");
    expect(toDraftRequest(s)).toEqual({
      allies: ["a"],
      enemies: ["e"],
      unavailable: ["g", "j"],
    });
  });

  it("what-if selection does not leak into the payload", () => {
    const s = withWhatIf(newSession(), "b");
    expect(toDraftRequest(s)).toEqual({ allies: [], enemies: [], unavailable: [] });
  });
});

describe("snapshot staleness", () => {
  it("is never stale before any version was seen", () => {
    expect(isStale(newSession(), 7)).toBe(false);
  });

  it("flags any version change after the first", () => {
    const s = withSnapshotVersion(newSession(), 1);
    expect(isStale(s, 1)).toBe(false);
    expect(isStale(s, 2)).toBe(true);
  });
});
