// DOM wiring: builds the board from the roster, forwards edits to the
// controller, and renders its view. Number cells show RawNum.raw verbatim.

import { ApiClient, RecommendationRow } from "./api.js";
import { serviceBaseUrl } from "./config.js";
import { BoardView, DraftController, TEAM_SIZE } from "./controller.js";

const api = new ApiClient(serviceBaseUrl());
const controller = new DraftController(api, render);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, className?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function byId(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function renderBanner(view: BoardView): void {
  const banner = byId("roster-banner");
  banner.innerHTML = "";
  if (view.rosterError === null) {
    banner.hidden = true;
    return;
  }
  banner.hidden = false;
  banner.append(el("span", "", `roster unavailable: ${view.rosterError} `));
  const retry = el("button", "", "retry");
  retry.onclick = () => void controller.loadRoster();
  banner.append(retry);
}

function slotSelect(view: BoardView, side: "ally" | "enemy", slot: number): HTMLSelectElement {
  const select = el("select", "slot");
  const current = (side === "ally" ? view.ally : view.enemy)[slot];
  select.append(new Option("(empty)", ""));
  const filter = view.poolFilter.toLowerCase();
  const picked = new Set([...view.ally, ...view.enemy].filter((n) => n !== null));
  for (const name of view.avatars) {
    if (name !== current) {
      if (picked.has(name)) continue; // duplicate selection blocked
      if (filter && !name.toLowerCase().includes(filter)) continue;
    }
    const option = new Option(name, name);
    option.selected = name === current;
    select.append(option);
  }
  select.value = current ?? "";
  select.onchange = () => controller.setSlot(side, slot, select.value === "" ? null : select.value);
  return select;
}

function renderSlots(view: BoardView): void {
  for (const side of ["ally", "enemy"] as const) {
    const container = byId(`${side}-slots`);
    container.innerHTML = "";
    for (let i = 0; i < TEAM_SIZE; i++) {
      const wrap = el("div", "slot-wrap");
      wrap.append(el("label", "", `${side} ${i + 1}`));
      wrap.append(slotSelect(view, side, i));
      container.append(wrap);
    }
  }
}

function renderGauge(view: BoardView): void {
  const gauge = byId("gauge");
  const label = byId("gauge-label");
  if (view.probability === null) {
    gauge.style.width = "50%";
    label.textContent = "pick at least one avatar per side";
    return;
  }
  gauge.style.width = `${view.probability.value * 100}%`;
  const suffix = view.probabilityFinal ? " (final: ally side full)" : "";
  label.textContent = `p(ally side wins) = ${view.probability.raw}${suffix}`;
}

function recommendationRow(rec: RecommendationRow): HTMLTableRowElement {
  const tr = el("tr");
  tr.append(el("td", "", rec.avatar));
  for (const cell of [rec.winProbability, rec.biasDelta, rec.synergyDelta,
                      rec.oppositionDelta]) {
    tr.append(el("td", "num", cell.raw));
  }
  tr.append(el("td", "", rec.similarFamiliar.map((s) => s.avatar).join(", ")));
  const first = tr.firstChild as HTMLElement;
  first.onclick = () => controller.exploreAvatar(rec.avatar);
  return tr;
}

function renderRecommendations(view: BoardView): void {
  const section = byId("recommend-section");
  const tbody = byId("recommend-body");
  tbody.innerHTML = "";
  if (view.recommendations === null) {
    section.hidden = true;
    return;
  }
  section.hidden = false;
  for (const rec of view.recommendations) {
    tbody.append(recommendationRow(rec));
  }
  const best = byId("familiar-best");
  best.textContent = view.familiarBest === null
    ? ""
    : `best familiar pick: ${view.familiarBest.avatar} ` +
      `(p = ${view.familiarBest.winProbability.raw})`;
}

function renderFamiliar(view: BoardView): void {
  const container = byId("familiar-picker");
  container.innerHTML = "";
  for (const name of view.avatars) {
    const label = el("label", "familiar-item");
    const box = el("input") as HTMLInputElement;
    box.type = "checkbox";
    box.checked = view.familiar.includes(name);
    box.onchange = () => controller.toggleFamiliar(name);
    label.append(box, document.createTextNode(name));
    container.append(label);
  }
}

function renderPair(view: BoardView): void {
  const panel = byId("pair-panel");
  if (view.pair === null) {
    panel.textContent = view.pairSelection === null
      ? "click two avatar names to compare them"
      : `comparing ${view.pairSelection} with ...`;
    return;
  }
  panel.innerHTML = "";
  panel.append(el("div", "", `${view.pair.a} vs ${view.pair.b}`));
  panel.append(el("div", "num", `synergy ${view.pair.synergy.raw}`));
  panel.append(el("div", "num", `opposition ${view.pair.opposition.raw}`));
  panel.append(el("div", "num", `cosine ${view.pair.cosine.raw}`));
}

function render(view: BoardView): void {
  renderBanner(view);
  renderSlots(view);
  renderGauge(view);
  renderRecommendations(view);
  renderFamiliar(view);
  renderPair(view);
  const error = byId("error-line");
  error.textContent = view.error ?? "";
  error.hidden = view.error === null;
}

function wireStaticControls(): void {
  (byId("pool-filter") as HTMLInputElement).oninput = (event) =>
    controller.setPoolFilter((event.target as HTMLInputElement).value);
  byId("swap-teams").onclick = () => controller.swapTeams();
}

wireStaticControls();
void controller.loadRoster();
