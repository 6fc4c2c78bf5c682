/** DOM rendering. All values come from the view models in model.ts. */

import {
  AnswerBadge,
  AnswerPayload,
  DiagramLayout,
  PhaseErrorDetail,
  PlanRow,
  TimingSegment,
} from "./model.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderError(container: HTMLElement, detail: PhaseErrorDetail): void {
  container.replaceChildren();
  const banner = el("div", "error-banner");
  banner.append(
    el("span", "error-phase", `${detail.phase} error`),
    el("span", "error-message", detail.message),
  );
  container.append(banner);
}

export function clearError(container: HTMLElement): void {
  container.replaceChildren();
}

export function renderAnswers(container: HTMLElement, badges: AnswerBadge[]): void {
  container.replaceChildren();
  if (badges.length === 0) {
    container.append(el("p", "empty-state", "No answers. The plans below are still inspectable."));
    return;
  }
  for (const badge of badges) {
    const row = el("div", `answer answer-${badge.badge}`);
    row.append(el("span", "answer-value", badge.value));
    row.append(el("span", `badge badge-${badge.badge}`, badge.badge));
    if (badge.reason) row.append(el("span", "answer-reason", badge.reason));
    if (badge.classType) row.append(el("span", "answer-class", badge.classType));
    row.append(el("span", "answer-rank", `plan #${badge.sourceRankText}`));
    container.append(row);
  }
}

export function renderPlans(
  container: HTMLElement,
  rows: PlanRow[],
  onSelect: (row: PlanRow) => void,
): void {
  container.replaceChildren();
  for (const row of rows) {
    const item = el("div", "plan");
    const head = el("div", "plan-head");
    head.append(
      el("span", "plan-rank", `#${row.rank}`),
      el("span", "plan-form", row.form.toUpperCase()),
      el("span", "plan-score", `score ${row.scoreText}`),
      el("span", "plan-triples", `${row.tripleCount} triple(s)`),
    );
    const body = el("pre", "plan-sparql", row.sparql);
    const pick = el("button", "plan-pick", "Edit & execute");
    pick.addEventListener("click", () => onSelect(row));
    item.append(head, body, pick);
    container.append(item);
  }
}

export function renderTimings(container: HTMLElement, segments: TimingSegment[]): void {
  container.replaceChildren();
  const bar = el("div", "timing-bar");
  const legend = el("div", "timing-legend");
  for (const segment of segments) {
    const chunk = el("div", `timing-segment timing-${segment.phase}`);
    chunk.style.flexGrow = String(Math.max(segment.fraction, 0.02));
    chunk.title = `${segment.label}: ${segment.secondsText}s`;
    bar.append(chunk);
    legend.append(el("span", `timing-label timing-${segment.phase}`,
      `${segment.label} ${segment.secondsText}s`));
  }
  container.append(bar, legend);
}

export function renderDiagram(svg: SVGSVGElement, layout: DiagramLayout): void {
  svg.replaceChildren();
  for (const edge of layout.edges) {
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(edge.x1));
    line.setAttribute("y1", String(edge.y1));
    line.setAttribute("x2", String(edge.x2));
    line.setAttribute("y2", String(edge.y2));
    line.setAttribute("class", "pgp-edge");
    svg.append(line);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String((edge.x1 + edge.x2) / 2));
    label.setAttribute("y", String((edge.y1 + edge.y2) / 2 - 6));
    label.setAttribute("class", "pgp-edge-label");
    label.textContent = edge.annotation ? `${edge.label} → ${shorten(edge.annotation)}` : edge.label;
    svg.append(label);
  }
  for (const node of layout.nodes) {
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(node.x));
    circle.setAttribute("cy", String(node.y));
    circle.setAttribute("r", node.isMain ? "26" : "20");
    circle.setAttribute(
      "class",
      `pgp-node pgp-${node.kind}${node.isMain ? " pgp-main" : ""}`,
    );
    svg.append(circle);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(node.x));
    label.setAttribute("y", String(node.y + 38));
    label.setAttribute("class", "pgp-node-label");
    label.setAttribute("text-anchor", "middle");
    label.textContent = node.annotation
      ? `${node.label} → ${shorten(node.annotation)}`
      : node.label;
    svg.append(label);
  }
}

export function renderComparison(
  container: HTMLElement,
  original: string[],
  edited: string[],
): void {
  container.replaceChildren();
  const table = el("div", "comparison");
  const left = el("div", "comparison-column");
  left.append(el("h4", undefined, "Pipeline answers"));
  for (const value of original) left.append(el("div", "comparison-value", value));
  if (original.length === 0) left.append(el("div", "empty-state", "(none)"));
  const right = el("div", "comparison-column");
  right.append(el("h4", undefined, "Edited plan answers"));
  for (const value of edited) right.append(el("div", "comparison-value", value));
  if (edited.length === 0) right.append(el("div", "empty-state", "(none)"));
  table.append(left, right);
  container.append(table);
}

export function renderHistory(
  container: HTMLElement,
  questions: string[],
  onSelect: (question: string) => void,
): void {
  container.replaceChildren();
  for (const question of [...questions].reverse()) {
    const item = el("button", "history-item", question);
    item.addEventListener("click", () => onSelect(question));
    container.append(item);
  }
}

function shorten(iri: string): string {
  const cut = iri.split(/[/#]/).filter(Boolean).pop();
  return cut ?? iri;
}

export function responseJson(payload: AnswerPayload): string {
  return JSON.stringify(payload, null, 2);
}
