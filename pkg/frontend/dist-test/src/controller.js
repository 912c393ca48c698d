"use strict";
// Draft board state machine. All numbers shown to the user come straight from
// service responses (RawNum spans); the controller never does model math.
//
// Concurrency: single-threaded event flow. Every in-flight request carries a
// monotonically increasing per-panel sequence number and a response is applied
// only if it is still the newest request for that panel, so a slow stale
// response can never overwrite a fresher one.
Object.defineProperty(exports, "__esModule", { value: true });
exports.DraftController = exports.DEBOUNCE_MS = exports.TEAM_SIZE = void 0;
const api_js_1 = require("./api.js");
exports.TEAM_SIZE = 5;
exports.DEBOUNCE_MS = 150;
const defaultScheduler = (fn, ms) => {
    const handle = setTimeout(fn, ms);
    return () => clearTimeout(handle);
};
class DraftController {
    constructor(api, onRender, scheduler = defaultScheduler, debounceMs = exports.DEBOUNCE_MS) {
        this.api = api;
        this.onRender = onRender;
        this.scheduler = scheduler;
        this.debounceMs = debounceMs;
        this.avatars = [];
        this.rosterError = null;
        this.ally = new Array(exports.TEAM_SIZE).fill(null);
        this.enemy = new Array(exports.TEAM_SIZE).fill(null);
        this.familiar = new Set();
        this.poolFilter = "";
        this.probability = null;
        this.probabilityFinal = false;
        this.recommendations = null;
        this.familiarBest = null;
        this.pair = null;
        this.pairSelection = null;
        this.error = null;
        this.predictSeq = 0;
        this.recommendSeq = 0;
        this.pairSeq = 0;
        this.cancelPending = null;
        this.inflight = Promise.resolve();
    }
    view() {
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
    render() {
        this.onRender(this.view());
    }
    async loadRoster() {
        try {
            const entries = await this.api.avatars();
            this.avatars = entries.map((e) => e.name);
            this.rosterError = null;
        }
        catch (err) {
            // leave any previous roster in place; the banner offers a retry
            this.rosterError = err instanceof api_js_1.ServiceError ? err.message : String(err);
        }
        this.render();
    }
    picked() {
        const names = new Set();
        for (const name of [...this.ally, ...this.enemy]) {
            if (name !== null)
                names.add(name);
        }
        return names;
    }
    setSlot(side, slot, name) {
        if (slot < 0 || slot >= exports.TEAM_SIZE)
            throw new RangeError(`slot ${slot} out of range`);
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
    swapTeams() {
        [this.ally, this.enemy] = [this.enemy, this.ally];
        this.error = null;
        this.scheduleRefresh();
        this.render();
    }
    toggleFamiliar(name) {
        if (!this.avatars.includes(name)) {
            this.error = `unknown avatar: ${name}`;
            this.render();
            return;
        }
        if (this.familiar.has(name)) {
            this.familiar.delete(name);
        }
        else {
            this.familiar.add(name);
        }
        this.error = null;
        this.scheduleRefresh();
        this.render();
    }
    setPoolFilter(text) {
        this.poolFilter = text;
        this.render();
    }
    // two clicks select a pair; the panel is symmetric in click order
    exploreAvatar(name) {
        if (this.pairSelection === null || this.pairSelection === name) {
            this.pairSelection = name;
            this.render();
            return;
        }
        const a = this.pairSelection;
        this.pairSelection = null;
        const seq = ++this.pairSeq;
        this.track(this.api.pair(a, name).then((scores) => {
            if (seq !== this.pairSeq)
                return;
            this.pair = scores;
            this.error = null;
            this.render();
        }, (err) => {
            if (seq !== this.pairSeq)
                return;
            this.error = err instanceof api_js_1.ServiceError ? err.message : String(err);
            this.render();
        }));
    }
    scheduleRefresh() {
        if (this.cancelPending)
            this.cancelPending();
        let fired = false; // a synchronous scheduler fires before we can store the cancel
        const cancel = this.scheduler(() => {
            fired = true;
            this.cancelPending = null;
            this.issueRequests();
        }, this.debounceMs);
        this.cancelPending = fired ? null : cancel;
    }
    allyPicks() {
        return this.ally.filter((n) => n !== null);
    }
    enemyPicks() {
        return this.enemy.filter((n) => n !== null);
    }
    track(p) {
        this.inflight = this.inflight.then(() => p, () => p).then(() => undefined);
    }
    issueRequests() {
        const ally = this.allyPicks();
        const enemy = this.enemyPicks();
        if (ally.length > 0 && enemy.length > 0) {
            const seq = ++this.predictSeq;
            this.track(this.api.predict(ally, enemy).then((result) => {
                if (seq !== this.predictSeq)
                    return;
                this.probability = result.pRedWin;
                this.probabilityFinal = ally.length === exports.TEAM_SIZE;
                this.error = null;
                this.render();
            }, (err) => {
                if (seq !== this.predictSeq)
                    return;
                this.error = err instanceof api_js_1.ServiceError ? err.message : String(err);
                this.render();
            }));
        }
        else {
            this.predictSeq++; // discard any in-flight prediction for the old board
            this.probability = null;
            this.probabilityFinal = false;
            this.render();
        }
        if (ally.length < exports.TEAM_SIZE) {
            const seq = ++this.recommendSeq;
            const familiar = this.familiar.size > 0 ? [...this.familiar].sort() : undefined;
            this.track(this.api.recommend({ ally, enemy, familiar }).then((result) => {
                if (seq !== this.recommendSeq)
                    return;
                this.recommendations = result.recommendations;
                this.familiarBest = result.familiarBest;
                this.error = null;
                this.render();
            }, (err) => {
                if (seq !== this.recommendSeq)
                    return;
                this.error = err instanceof api_js_1.ServiceError ? err.message : String(err);
                this.render();
            }));
        }
        else {
            // a full ally side has nothing left to recommend: show the final p only,
            // and invalidate any recommendation still in flight for the old board
            this.recommendSeq++;
            this.recommendations = null;
            this.familiarBest = null;
            this.render();
        }
    }
    // test hook: wait for the debounced refresh and every in-flight request
    async flush() {
        let guard = 0;
        while (this.cancelPending !== null && guard++ < 1000) {
            await new Promise((resolve) => setTimeout(resolve, this.debounceMs + 10));
        }
        await this.inflight;
    }
}
exports.DraftController = DraftController;
