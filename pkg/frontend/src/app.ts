/**
 * DOM wiring for the workbench. All logic lives in workbench/state/
 * charts; this layer only renders state and forwards events.
 */

import { ApiClient } from "./api.js";
import { chartSvg } from "./charts.js";
import { POS_CLASSES, type WorkbenchState, cellEdited } from "./state.js";
import { Workbench } from "./workbench.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
};

const api = new ApiClient((input, init) => fetch(input, init));
const bench = new Workbench(api, render);

function jobBadge(job: WorkbenchState["countsJob"]): string {
  if (!job) {
    return "";
  }
  const pct = Math.round(job.progress * 100);
  return `<span class="job job-${job.status}">${job.status} ${pct}%</span>`;
}

function renderThresholds(state: WorkbenchState): void {
  const rows = POS_CLASSES.map((cls) => {
    const cells = (["left", "right"] as const)
      .map((side) => {
        const edited = cellEdited(state, cls, side) ? " edited" : "";
        return (
          `<td><input type="number" min="0" step="0.5" class="threshold${edited}"` +
          ` data-cls="${cls}" data-side="${side}" value="${state.edited[cls][side]}"></td>`
        );
      })
      .join("");
    return `<tr><th>${cls}</th>${cells}</tr>`;
  }).join("");
  $("threshold-rows").innerHTML = rows;
  const commit = $<HTMLButtonElement>("commit-thresholds");
  commit.disabled = state.countsJob?.status === "running" || state.countsJob?.status === "queued";
  $("counts-job").innerHTML = jobBadge(state.countsJob);
  for (const input of document.querySelectorAll<HTMLInputElement>("input.threshold")) {
    input.onchange = () => {
      const result = bench.editThreshold(
        input.dataset["cls"] as (typeof POS_CLASSES)[number],
        input.dataset["side"] as "left" | "right",
        Number(input.value),
      );
      input.classList.toggle("invalid", !result.ok);
    };
  }
}

function renderNeighbors(state: WorkbenchState): void {
  const list = $("neighbors");
  if (state.neighbors === null) {
    list.innerHTML = '<p class="hint">enter a central word and expand</p>';
    return;
  }
  const items = state.neighbors
    .map((n) => {
      const cls = n.included ? "" : " excluded";
      const checked = n.included ? " checked" : "";
      return (
        `<li class="neighbor${cls}"><label>` +
        `<input type="checkbox" data-word="${n.word}"${checked}> ` +
        `<span class="word">${n.word}</span> <span class="score">${n.score.toFixed(4)}</span>` +
        `</label></li>`
      );
    })
    .join("");
  list.innerHTML = `<ul class="${state.neighborsStale ? "stale" : ""}">${items}</ul>`;
  for (const box of list.querySelectorAll<HTMLInputElement>("input[type=checkbox]")) {
    box.onchange = () => void bench.toggleNeighbor(box.dataset["word"] ?? "", box.checked);
  }
  $<HTMLButtonElement>("condense").disabled = !bench.canCondense();
}

function renderStats(state: WorkbenchState): void {
  const target = $("condense-stats");
  if (!state.stats) {
    target.innerHTML = "";
    return;
  }
  const s = state.stats;
  target.innerHTML =
    `<table><tr><th></th><th>kept</th><th>scanned</th></tr>` +
    `<tr><th>lines</th><td>${s.lines.kept}</td><td>${s.lines.scanned}</td></tr>` +
    `<tr><th>bytes</th><td>${s.bytes.kept}</td><td>${s.bytes.scanned}</td></tr></table>` +
    `<p>reduction ratio: ${s.reduction_ratio.toFixed(4)}</p>`;
}

function renderTopics(state: WorkbenchState): void {
  $("topics-job").innerHTML = jobBadge(state.topicsJob);
  const target = $("topic-panel");
  if (!state.model) {
    target.innerHTML = "";
    return;
  }
  const rows = state.model.top_words
    .map((words, t) => `<tr><th>topic ${t}</th><td>${words.join(" ")}</td></tr>`)
    .join("");
  const summary = state.model.summary
    ? `<p class="summary">combined: ${state.model.summary.join(" ")}</p>`
    : "";
  target.innerHTML = `<table>${rows}</table>${summary}`;
}

function renderCharts(state: WorkbenchState): void {
  $("freq-chart").innerHTML = chartSvg(state.freq, { breakOnGaps: false });
  $("sim-chart").innerHTML = chartSvg(state.sim, {
    breakOnGaps: true,
    valueDomain: [0, 1],
  });
}

function render(state: WorkbenchState): void {
  renderThresholds(state);
  renderNeighbors(state);
  renderStats(state);
  renderTopics(state);
  renderCharts(state);
  $("notice").textContent = state.notice ?? "";
}

function wireActions(): void {
  $<HTMLButtonElement>("expand").onclick = () => {
    const central = $<HTMLInputElement>("central").value.trim();
    const k = Number($<HTMLInputElement>("k").value) || 300;
    if (central) {
      void bench.expand(central, k);
    }
  };
  $<HTMLButtonElement>("commit-thresholds").onclick = () => void bench.commitThresholds();
  $<HTMLButtonElement>("condense").onclick = () => void bench.condense();
  $<HTMLButtonElement>("draw-topics").onclick = () => {
    void bench.drawTopics({
      seed: Number($<HTMLInputElement>("lda-seed").value) || 42,
      k: Number($<HTMLInputElement>("lda-k").value) || 20,
      iterations: Number($<HTMLInputElement>("lda-iters").value) || 1000,
      burn_in: 0,
      summary: true,
    });
  };
  $<HTMLButtonElement>("load-series").onclick = () => {
    const word = $<HTMLInputElement>("series-word").value.trim();
    const from = Number($<HTMLInputElement>("series-from").value);
    const to = Number($<HTMLInputElement>("series-to").value);
    const base = Number($<HTMLInputElement>("series-base").value) || from;
    if (word && from && to) {
      void bench.loadFreqSeries(word, from, to);
      void bench.loadSimSeries(word, base, from, to);
    }
  };
}

async function boot(): Promise<void> {
  wireActions();
  render(bench.state);
  try {
    const health = await api.health();
    $("corpus-info").textContent =
      `corpus: years ${health.corpus.years[0]}..${health.corpus.years.at(-1)}, ` +
      `${health.corpus.tokens.toLocaleString()} tokens`;
  } catch {
    $("corpus-info").textContent = "service unreachable";
  }
}

void boot();
