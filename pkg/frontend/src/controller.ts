// Draft board state machine. All numbers shown to the user come straight from
// service responses (RawNum spans); the controller never does model math.
//
// Concurrency: single-threaded event flow. Every in-flight request carries a
// monotonically increasing per-panel sequence number and a response is applied
// only if it is still the newest request for that panel, so a slow stale
// response can never overwrite a fresher one.

import { ApiClient, PairScores, RecommendationRow, ServiceError } from "./api.js";
import { RawNum } from "./rawjson.js";

export const TEAM_SIZE = 5;
export const DEBOUNCE_MS = 150;

export type Side = "ally" | "enemy";

export interface BoardView {
  avatars: string[];
  rosterError: string | null;
  ally: (string | null)[];
  enemy: (string | null)[];
  familiar: string[];
  poolFilter: string;
  probability: RawNum | null;
  probabilityFinal: boolean;
  recommendations: RecommendationRow[] | null;
  familiarBest: RecommendationRow | null;
  pair: PairScores | null;
  pairSelection: string | null;
  error: string | null;
}

// returns a cancel function; injectable so tests control time
export type Scheduler = (fn: () => void, ms: number) => () => void;

const defaultScheduler: Scheduler = (fn, ms) => {
  const handle = setTimeout(fn, ms);
  return () => clearTimeout(handle);
};

export class DraftController {
  private avatars: string[] = [];
  private rosterError: string | null = null;
  private ally: (string | null)[] = new Array(TEAM_SIZE).fill(null);
  private enemy: (string | null)[] = new Array(TEAM_SIZE).fill(null);
  private familiar = new Set<string>();
  private poolFilter = "";
  private probability: RawNum | null = null;
  private probabilityFinal = false;
  private recommendations: RecommendationRow[] | null = null;
  private familiarBest: RecommendationRow | null = null;
  private pair: PairScores | null = null;
  private pairSelection: string | null = null;
  private error: string | null = null;

  private predictSeq = 0;
  private recommendSeq = 0;
  private pairSeq = 0;
  private cancelPending: (() => void) | null = null;
  private inflight: Promise<void> = Promise.resolve();

  constructor(
    private readonly api: ApiClient,
    private readonly onRender: (view: BoardView) => void,
    private readonly scheduler: Scheduler = defaultScheduler,
    private readonly debounceMs: number = DEBOUNCE_MS,
  ) {}

  view(): BoardView {
    return {
      avatars: [...this.avatars],
      rosterError: this.rosterError,
      ally: [...this.ally],
      enemy: [...this.enemy],
      familiar: [...this.familiar].sort(),
      poolFilter: this.poolFilter,
      probability: this.probability,
      probabilityFinal: this.probabilityFinal,
      recommendations: this.recommendations ? [...this.recommendations] : null,
      familiarBest: this.familiarBest,
      pair: this.pair,
      pairSelection: this.pairSelection,
      error: this.error,
    };
  }

  private render(): void {
    this.onRender(this.view());
  }

  async loadRoster(): Promise<void> {
    try {
      const entries = await this.api.avatars();
      this.avatars = entries.map((e) => e.name);
      this.rosterError = null;
    } catch (err) {
      // leave any previous roster in place; the banner offers a retry
      this.rosterError = err instanceof ServiceError ? err.message : String(err);
    }
    this.render();
  }

  picked(): Set<string> {
    const names = new Set<string>();
    for (const name of [...this.ally, ...this.enemy]) {
      if (name !== null) names.add(name);
    }
    return names;
  }

  setSlot(side: Side, slot: number, name: string | null): void {
    if (slot < 0 || slot >= TEAM_SIZE) throw new RangeError(`slot ${slot} out of range`);
    const slots = side === "ally" ? this.ally : this.enemy;
    if (name !== null) {
      if (!this.avatars.includes(name)) {
        this.error = `unknown avatar: ${name}`;
        this.render();
        return;
      }
      const takenElsewhere = this.picked().has(name) && slots[slot] !== name;
      if (takenElsewhere) {
        this.error = `${name} is already picked`;
        this.render();
        return;
      }
    }
    slots[slot] = name;
    this.error = null;
    this.scheduleRefresh();
    this.render();
  }

  swapTeams(): void {
    [this.ally, this.enemy] = [this.enemy, this.ally];
    this.error = null;
    this.scheduleRefresh();
    this.render();
  }

  toggleFamiliar(name: string): void {
    if (!this.avatars.includes(name)) {
      this.error = `unknown avatar: ${name}`;
      this.render();
      return;
    }
    if (this.familiar.has(name)) {
      this.familiar.delete(name);
    } else {
      this.familiar.add(name);
    }
    this.error = null;
    this.scheduleRefresh();
    this.render();
  }

  setPoolFilter(text: string): void {
    this.poolFilter = text;
    this.render();
  }

  // two clicks select a pair; the panel is symmetric in click order
  exploreAvatar(name: string): void {
    if (this.pairSelection === null || this.pairSelection === name) {
      this.pairSelection = name;
      this.render();
      return;
    }
    const a = this.pairSelection;
    this.pairSelection = null;
    const seq = ++this.pairSeq;
    this.track(this.api.pair(a, name).then(
      (scores) => {
        if (seq !== this.pairSeq) return;
        this.pair = scores;
        this.error = null;
        this.render();
      },
      (err) => {
        if (seq !== this.pairSeq) return;
        this.error = err instanceof ServiceError ? err.message : String(err);
        this.render();
      },
    ));
  }

  private scheduleRefresh(): void {
    if (this.cancelPending) this.cancelPending();
    let fired = false;  // a synchronous scheduler fires before we can store the cancel
    const cancel = this.scheduler(() => {
      fired = true;
      this.cancelPending = null;
      this.issueRequests();
    }, this.debounceMs);
    this.cancelPending = fired ? null : cancel;
  }

  private allyPicks(): string[] {
    return this.ally.filter((n): n is string => n !== null);
  }

  private enemyPicks(): string[] {
    return this.enemy.filter((n): n is string => n !== null);
  }

  private track(p: Promise<void>): void {
    this.inflight = this.inflight.then(() => p, () => p).then(() => undefined);
  }

  private issueRequests(): void {
    const ally = this.allyPicks();
    const enemy = this.enemyPicks();

    if (ally.length > 0 && enemy.length > 0) {
      const seq = ++this.predictSeq;
      this.track(this.api.predict(ally, enemy).then(
        (result) => {
          if (seq !== this.predictSeq) return;
          this.probability = result.pRedWin;
          this.probabilityFinal = ally.length === TEAM_SIZE;
          this.error = null;
          this.render();
        },
        (err) => {
          if (seq !== this.predictSeq) return;
          this.error = err instanceof ServiceError ? err.message : String(err);
          this.render();
        },
      ));
    } else {
      this.predictSeq++;  // discard any in-flight prediction for the old board
      this.probability = null;
      this.probabilityFinal = false;
      this.render();
    }

    if (ally.length < TEAM_SIZE) {
      const seq = ++this.recommendSeq;
      const familiar = this.familiar.size > 0 ? [...this.familiar].sort() : undefined;
      this.track(this.api.recommend({ ally, enemy, familiar }).then(
        (result) => {
          if (seq !== this.recommendSeq) return;
          this.recommendations = result.recommendations;
          this.familiarBest = result.familiarBest;
          this.error = null;
          this.render();
        },
        (err) => {
          if (seq !== this.recommendSeq) return;
          this.error = err instanceof ServiceError ? err.message : String(err);
          this.render();
        },
      ));
    } else {
      // a full ally side has nothing left to recommend: show the final p only,
      // and invalidate any recommendation still in flight for the old board
      this.recommendSeq++;
      this.recommendations = null;
      this.familiarBest = null;
      this.render();
    }
  }

  // test hook: wait for the debounced refresh and every in-flight request
  async flush(): Promise<void> {
    let guard = 0;
    while (this.cancelPending !== null && guard++ < 1000) {
      await new Promise((resolve) => setTimeout(resolve, this.debounceMs + 10));
    }
    await this.inflight;
  }
}
