/** Console wiring: question box, plan inspector, editor, history. */

import { ApiError, SessionClient } from "./api.js";
import {
  AnswerPayload,
  PlanRow,
  answerBadges,
  executeValues,
  pgpLayout,
  phaseErrorFromBody,
  planRows,
  timingSegments,
} from "./model.js";
import {
  clearError,
  renderAnswers,
  renderComparison,
  renderDiagram,
  renderError,
  renderHistory,
  renderPlans,
  renderTimings,
} from "./render.js";

const client = new SessionClient();
const history: string[] = [];
let lastResponse: AnswerPayload | null = null;
let selectedPlan: PlanRow | null = null;

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const questionInput = byId<HTMLInputElement>("question");
const endpointInput = byId<HTMLInputElement>("endpoint");
const submitButton = byId<HTMLButtonElement>("submit");
const errorBox = byId<HTMLDivElement>("error");
const answersBox = byId<HTMLDivElement>("answers");
const plansBox = byId<HTMLDivElement>("plans");
const timingsBox = byId<HTMLDivElement>("timings");
const historyBox = byId<HTMLDivElement>("history");
const editorBox = byId<HTMLDivElement>("editor");
const editorText = byId<HTMLTextAreaElement>("editor-text");
const editorRun = byId<HTMLButtonElement>("editor-run");
const comparisonBox = byId<HTMLDivElement>("comparison");
const diagram = document.getElementById("diagram") as unknown as SVGSVGElement;
const predictionBox = byId<HTMLDivElement>("prediction");

function showResponse(payload: AnswerPayload): void {
  lastResponse = payload;
  clearError(errorBox);
  renderAnswers(answersBox, answerBadges(payload));
  renderPlans(plansBox, planRows(payload), pickPlan);
  renderTimings(timingsBox, timingSegments(payload));
  renderDiagram(diagram, pgpLayout(payload.agp, 640, 360));
  const prediction = payload.prediction;
  predictionBox.textContent = prediction
    ? `predicted answer type: ${prediction.data_type}` +
      (prediction.semantic_type ? ` / ${prediction.semantic_type}` : "")
    : "";
  editorBox.hidden = true;
  comparisonBox.replaceChildren();
}

function pickPlan(row: PlanRow): void {
  selectedPlan = row;
  editorText.value = row.sparql;
  editorBox.hidden = false;
}

async function submit(): Promise<void> {
  const question = questionInput.value.trim();
  if (!question) return;
  submitButton.disabled = true;
  try {
    const payload = await client.answer(
      question,
      endpointInput.value.trim() || undefined,
    );
    if (!history.includes(question)) history.push(question);
    renderHistory(historyBox, history, (q) => {
      questionInput.value = q;
      void submit();
    });
    showResponse(payload);
  } catch (error) {
    if (error instanceof DOMException && error.name === "AbortError") {
      return; // superseded by a newer question
    }
    if (error instanceof ApiError) {
      renderError(errorBox, error.detail);
    } else {
      renderError(errorBox, phaseErrorFromBody(null));
    }
  } finally {
    submitButton.disabled = false;
  }
}

async function runEditedPlan(): Promise<void> {
  if (!lastResponse || !selectedPlan) return;
  editorRun.disabled = true;
  try {
    const payload = await client.execute(
      editorText.value,
      endpointInput.value.trim() || undefined,
    );
    const edited = executeValues(payload, selectedPlan.mainVar);
    const original = lastResponse.answers.map((a) => a.value);
    renderComparison(comparisonBox, original, edited);
  } catch (error) {
    if (error instanceof ApiError) {
      renderError(errorBox, error.detail);
    }
  } finally {
    editorRun.disabled = false;
  }
}

submitButton.addEventListener("click", () => void submit());
questionInput.addEventListener("keydown", (event) => {
  if (event.key === "Enter") void submit();
});
editorRun.addEventListener("click", () => void runEditedPlan());

void client.health().then((status) => {
  byId<HTMLSpanElement>("health").textContent =
    status.status === "ok" ? `service ok (v${status.version})` : "service unreachable";
});
