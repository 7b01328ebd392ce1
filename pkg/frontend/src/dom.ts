/**
 * DOM renderer for the board.  Pure: builds a fresh element tree from a
 * BoardState; the caller swaps it into the page on every store change.
 * Machine-readable hooks (data-* attributes) double as test handles.
 */

import type { MatrixCellVm } from "./matrix.js";
import type { BoardState } from "./state.js";
import { EMPTY_THETA_MESSAGE, type SubsetChipVm } from "./theta.js";

export interface BoardHandlers {
  onDrop(alternative: string, tier: number): void;
  onDismissBanner?(): void;
  onDismissToast?(): void;
}

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderChip(alternative: string): HTMLElement {
  const chip = el("span", "chip", alternative);
  chip.setAttribute("draggable", "true");
  chip.dataset.alt = alternative;
  chip.addEventListener("dragstart", (event) => {
    (event as DragEvent).dataTransfer?.setData("text/plain", alternative);
  });
  return chip;
}

function renderColumn(
  label: string,
  tier: number | null,
  chips: readonly string[],
  handlers: BoardHandlers,
): HTMLElement {
  const column = el("div", "column");
  column.dataset.tier = tier === null ? "pool" : String(tier);
  column.append(el("h3", "column-label", label));
  for (const alt of chips) column.append(renderChip(alt));
  if (tier !== null) {
    column.addEventListener("dragover", (event) => event.preventDefault());
    column.addEventListener("drop", (event) => {
      event.preventDefault();
      const alt = (event as DragEvent).dataTransfer?.getData("text/plain");
      if (alt) handlers.onDrop(alt, tier);
    });
  }
  return column;
}

function renderMatrixCell(cell: MatrixCellVm): HTMLElement {
  const td = el("td");
  td.dataset.state = cell.state;
  if (cell.tooltip) td.title = cell.tooltip;
  if (cell.state === "observed") td.textContent = "obs";
  if (cell.diff) {
    const link = el("a", "diff", `diff: ${cell.diff.join(", ")}`);
    link.setAttribute("href", "#diff");
    link.dataset.diff = cell.diff.join(",");
    td.append(link);
  }
  return td;
}

function renderMatrix(state: BoardState): HTMLElement {
  const section = el("section", "matrix");
  section.dataset.version = String(state.matrix.version);
  if (state.selection.length === 0) {
    section.append(el("p", "matrix-empty", "no alternatives selected"));
    return section;
  }
  if (state.matrix.version !== state.version) {
    // never show verdicts computed at an older version than the board
    section.append(el("p", "matrix-stale", "updating..."));
    return section;
  }
  const alts = state.matrix.alternatives;
  const byPair = new Map<string, MatrixCellVm>();
  for (const cell of state.matrix.cells) {
    byPair.set(`${cell.first}|${cell.second}`, cell);
  }
  const table = el("table", "matrix-grid");
  const head = el("tr");
  head.append(el("th"));
  for (const alt of alts) head.append(el("th", undefined, alt));
  table.append(head);
  for (let i = 0; i < alts.length; i += 1) {
    const row = el("tr");
    row.append(el("th", undefined, alts[i]));
    for (let j = 0; j < alts.length; j += 1) {
      if (i === j) {
        row.append(el("td", "self"));
      } else if (i > j) {
        row.append(el("td", "mirror"));
      } else {
        const cell = byPair.get(`${alts[i]}|${alts[j]}`);
        row.append(cell ? renderMatrixCell(cell) : el("td", "missing"));
      }
    }
    table.append(row);
  }
  section.append(table);
  return section;
}

function renderSubsetChip(chip: SubsetChipVm): HTMLElement {
  const node = el("span", "subset-chip", chip.label);
  node.dataset.key = chip.key;
  if (chip.isNew) node.dataset.new = "true";
  const badge = el("span", "degree-badge", String(chip.degree));
  badge.title = `degree ${chip.degree}`;
  node.prepend(badge);
  return node;
}

function renderTheta(state: BoardState): HTMLElement {
  const section = el("section", "theta");
  section.dataset.version = String(state.theta.version);
  if (state.theta.empty) {
    section.append(el("p", "theta-empty", EMPTY_THETA_MESSAGE));
    return section;
  }
  for (const family of state.theta.families) {
    const card = el("div", "family-card");
    card.append(el("h4", undefined, family.title));
    for (const chip of family.chips) card.append(renderSubsetChip(chip));
    section.append(card);
  }
  const union = el("div", "unifying-card");
  union.append(el("h4", undefined, "unifying model"));
  for (const chip of state.theta.unifying) union.append(renderSubsetChip(chip));
  section.append(union);
  return section;
}

export function renderBoard(state: BoardState, handlers: BoardHandlers): HTMLElement {
  const root = el("div", "board");
  root.dataset.version = String(state.version);

  if (state.banner !== null) {
    const banner = el("div", "banner", state.banner);
    banner.dataset.kind = "warning";
    const dismiss = el("button", "dismiss", "dismiss");
    dismiss.addEventListener("click", () => handlers.onDismissBanner?.());
    banner.append(dismiss);
    root.append(banner);
  }
  if (state.toast !== null) {
    const toast = el("div", "toast", state.toast);
    toast.dataset.kind = "error";
    const dismiss = el("button", "dismiss", "dismiss");
    dismiss.addEventListener("click", () => handlers.onDismissToast?.());
    toast.append(dismiss);
    root.append(toast);
  }

  const columns = el("section", "columns");
  columns.append(renderColumn("unassigned", null, state.pool, handlers));
  for (let tier = state.tierCount; tier >= 1; tier -= 1) {
    columns.append(
      renderColumn(`tier ${tier}`, tier, state.columns[tier - 1] ?? [], handlers),
    );
  }
  root.append(columns);

  if (state.revised.length > 0) {
    const note = el("p", "revised", `${state.revised.length} verdict(s) revised`);
    note.dataset.count = String(state.revised.length);
    root.append(note);
  }

  root.append(renderMatrix(state));
  root.append(renderTheta(state));
  return root;
}
