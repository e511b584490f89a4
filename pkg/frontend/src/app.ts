/**
 * Application controller: owns the draft session, talks to the service, and
 * re-renders the affected views after every change.
 *
 * Data-flow rules the controller enforces:
 *  - every slot edit schedules exactly one debounced recommend request whose
 *    payload is the session's draft-state projection;
 *  - at most one recommend request is in flight (latest wins);
 *  - scores on screen always come verbatim from the latest service response.
 */
import {
  ApiClient,
  ApiError,
  RecommendResponse,
  SynergyApi,
  WhatIfResponse,
} from "./api.js";
import {
  renderRecommendations,
  renderSlots,
  renderTeamComplete,
} from "./board.js";
import { DEBOUNCE_MS, DebouncedFetcher } from "./debounce.js";
import { clear, el } from "./dom.js";
import { renderHeatmap } from "./heatmap.js";
import {
  DraftSession,
  Side,
  isStale,
  newSession,
  teamComplete,
  toDraftRequest,
  withBan,
  withPick,
  withSlot,
  withSnapshotVersion,
  withWhatIf,
  withoutBan,
} from "./session.js";
import { renderWhatIf, renderWhatIfError } from "./whatif.js";

export interface AppOptions {
  debounceMs?: number;
  /** Called after the suggestion list re-renders (tests await on this). */
  onBoardUpdate?: () => void;
  /** Called after the what-if panel re-renders. */
  onWhatIfUpdate?: () => void;
  /** Replaces location.reload for the stale-snapshot prompt. */
  reload?: () => void;
}

interface Nodes {
  banner: HTMLElement;
  slots: HTMLElement;
  recs: HTMLElement;
  whatIf: HTMLElement;
  draftPanel: HTMLElement;
  matrixPanel: HTMLElement;
  matrixBody: HTMLElement;
}

export class DraftApp {
  session: DraftSession = newSession();
  pool: string[] = [];

  private readonly refresher: DebouncedFetcher<RecommendResponse>;
  private nodes!: Nodes;
  private matrixLoaded = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: SynergyApi,
    private readonly opts: AppOptions = {},
  ) {
    this.refresher = new DebouncedFetcher<RecommendResponse>(
      (resp) => this.deliverRecommendations(resp),
      (err) => this.handleRefreshError(err),
      opts.debounceMs ?? DEBOUNCE_MS,
    );
  }

  async start(): Promise<void> {
    this.renderShell();
    let pool;
    try {
      pool = await this.client.pool();
    } catch (err) {
      this.showBanner(describe(err), "Retry", () => void this.start());
      return;
    }
    this.pool = pool.pool;
    this.session = withSnapshotVersion(this.session, pool.snapshot_version);
    this.hideBanner();
    this.renderSlots();
    this.refreshNow();
  }

  // ------------------------------------------------------------------ state

  handleSlotChange(side: Side, index: number, id: string | null): void {
    try {
      this.session = withSlot(this.session, side, index, id);
    } catch (err) {
      this.showBanner(describe(err));
      this.renderSlots(); // revert the select to the session's value
      return;
    }
    this.hideBanner();
    this.renderSlots();
    this.scheduleRefresh();
  }

  handlePick(id: string): void {
    try {
      this.session = withPick(this.session, id);
    } catch (err) {
      this.showBanner(describe(err));
      return;
    }
    this.renderSlots();
    this.scheduleRefresh();
  }

  handleBan(id: string): void {
    this.session = withBan(this.session, id);
    this.renderSlots();
    this.scheduleRefresh();
  }

  handleUnban(id: string): void {
    this.session = withoutBan(this.session, id);
    this.renderSlots();
    this.scheduleRefresh();
  }

  async handleWhatIf(candidate: string): Promise<void> {
    this.session = withWhatIf(this.session, candidate);
    let resp: WhatIfResponse;
    try {
      resp = await this.client.whatIf(toDraftRequest(this.session), candidate);
    } catch (err) {
      if (err instanceof ApiError && err.status > 0) {
        renderWhatIfError(this.nodes.whatIf, describe(err));
        this.opts.onWhatIfUpdate?.();
      } else {
        this.showBanner(describe(err), "Retry", () => void this.handleWhatIf(candidate));
      }
      return;
    }
    this.noteSnapshotVersion(resp.snapshot_version);
    renderWhatIf(this.nodes.whatIf, resp);
    this.opts.onWhatIfUpdate?.();
  }

  // ---------------------------------------------------------------- refresh

  /** Debounced refresh: one request per burst of slot edits. */
  scheduleRefresh(): void {
    if (teamComplete(this.session)) {
      this.refresher.cancel();
      renderTeamComplete(this.nodes.recs);
      this.opts.onBoardUpdate?.();
      return;
    }
    this.refresher.schedule((signal) =>
      this.client.recommend(toDraftRequest(this.session), signal),
    );
  }

  /** Immediate refresh for initial load and explicit retries. */
  refreshNow(): void {
    if (teamComplete(this.session)) {
      this.scheduleRefresh();
      return;
    }
    this.refresher.fire((signal) =>
      this.client.recommend(toDraftRequest(this.session), signal),
    );
  }

  private deliverRecommendations(resp: RecommendResponse): void {
    this.hideBanner();
    this.noteSnapshotVersion(resp.snapshot_version);
    renderRecommendations(this.nodes.recs, resp.recommendations, {
      onPick: (id) => this.handlePick(id),
      onWhatIf: (id) => void this.handleWhatIf(id),
      onBan: (id) => this.handleBan(id),
    });
    this.opts.onBoardUpdate?.();
  }

  private handleRefreshError(err: unknown): void {
    this.showBanner(describe(err), "Retry", () => this.refreshNow());
  }

  private noteSnapshotVersion(version: number): void {
    if (isStale(this.session, version)) {
      this.showBanner(
        "The analysis snapshot changed while you were drafting.",
        "Reload",
        this.opts.reload ?? (() => location.reload()),
      );
      return;
    }
    this.session = withSnapshotVersion(this.session, version);
  }

  // ----------------------------------------------------------------- views

  private renderShell(): void {
    clear(this.root);

    const tabs = el("div", "tabs");
    const draftTab = el("button", "tab active", "Draft");
    draftTab.dataset.tab = "draft";
    const matrixTab = el("button", "tab", "Matrix");
    matrixTab.dataset.tab = "matrix";
    tabs.appendChild(draftTab);
    tabs.appendChild(matrixTab);
    this.root.appendChild(tabs);

    const banner = el("div", "banner hidden");
    this.root.appendChild(banner);

    const draftPanel = el("div", "panel draft-panel");
    const slots = el("div", "slots");
    const board = el("div", "board");
    board.appendChild(el("h2", undefined, "Suggestions"));
    const recs = el("div", "recs");
    recs.appendChild(el("p", "recs-loading", "Loading…"));
    board.appendChild(recs);
    const whatIf = el("div", "whatif-panel");
    draftPanel.appendChild(slots);
    draftPanel.appendChild(board);
    draftPanel.appendChild(whatIf);
    this.root.appendChild(draftPanel);

    const matrixPanel = el("div", "panel matrix-panel hidden");
    const refresh = el("button", "matrix-refresh", "Refresh");
    refresh.addEventListener("click", () => void this.loadMatrix());
    matrixPanel.appendChild(refresh);
    const matrixBody = el("div", "matrix-body");
    matrixPanel.appendChild(matrixBody);
    this.root.appendChild(matrixPanel);

    draftTab.addEventListener("click", () => this.showTab("draft", draftTab, matrixTab));
    matrixTab.addEventListener("click", () => {
      this.showTab("matrix", matrixTab, draftTab);
      if (!this.matrixLoaded) void this.loadMatrix();
    });

    this.nodes = { banner, slots, recs, whatIf, draftPanel, matrixPanel, matrixBody };
  }

  private showTab(which: "draft" | "matrix", on: HTMLElement, off: HTMLElement): void {
    on.classList.add("active");
    off.classList.remove("active");
    this.nodes.draftPanel.classList.toggle("hidden", which !== "draft");
    this.nodes.matrixPanel.classList.toggle("hidden", which !== "matrix");
  }

  private renderSlots(): void {
    renderSlots(this.nodes.slots, this.session, this.pool, {
      onSlotChange: (side, index, id) => this.handleSlotChange(side, index, id),
      onUnban: (id) => this.handleUnban(id),
    });
  }

  async loadMatrix(): Promise<void> {
    try {
      const matrix = await this.client.matrix();
      this.noteSnapshotVersion(matrix.snapshot_version);
      renderHeatmap(this.nodes.matrixBody, matrix);
      this.matrixLoaded = true;
    } catch (err) {
      this.showBanner(describe(err), "Retry", () => void this.loadMatrix());
    }
  }

  // ---------------------------------------------------------------- banner

  private showBanner(message: string, action?: string, onAction?: () => void): void {
    const banner = this.nodes.banner;
    clear(banner);
    banner.classList.remove("hidden");
    banner.appendChild(el("span", "banner-message", message));
    if (action && onAction) {
      const button = el("button", "banner-action", action);
      button.addEventListener("click", onAction);
      banner.appendChild(button);
    }
  }

  private hideBanner(): void {
    this.nodes.banner.classList.add("hidden");
    clear(this.nodes.banner);
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status === 0
      ? "Service unreachable — is the snapshot server running?"
      : `Request rejected (${err.code}): ${err.detail}`;
  }
  return err instanceof Error ? err.message : String(err);
}

/** Mount the app; the service is assumed to live on the same origin. */
export function bootstrap(
  root: HTMLElement,
  client?: SynergyApi,
  opts?: AppOptions,
): DraftApp {
  const app = new DraftApp(root, client ?? new ApiClient(), opts);
  void app.start();
  return app;
}
