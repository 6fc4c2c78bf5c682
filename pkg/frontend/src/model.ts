/**
 * View models for the console.
 *
 * Every number or badge shown on screen is lifted verbatim from an API
 * payload; nothing here rescores plans or refilters answers. The contract
 * tests replay recorded API responses through these builders.
 */

export interface TermPayload {
  value: string;
  kind: string;
  datatype: string | null;
  lang: string | null;
  class_type: string | null;
  source_rank: number;
  kept: boolean;
  reason?: string;
}

export interface PlanPayload {
  rank: number;
  form: string;
  sparql: string;
  score: number;
  main_var: string | null;
  bgp: {
    triples: { subject: string; predicate: string; object: string }[];
    score: number;
  };
}

export interface PgpNodePayload {
  id: string;
  label: string;
  kind: string;
  is_main: boolean;
  relevant_vertices: { iri: string; description: string; score: number }[];
}

export interface PgpEdgePayload {
  id: string;
  label: string;
  endpoint_a: string;
  endpoint_b: string;
  relevant_predicates: {
    iri: string;
    description: string;
    score: number;
    anchor_vertex: string;
    object_flag: boolean;
  }[];
}

export interface PgpPayload {
  nodes: PgpNodePayload[];
  edges: PgpEdgePayload[];
  prediction: { data_type: string; semantic_type: string | null } | null;
  boolean_flagged: boolean;
}

export interface AnswerPayload {
  question: string;
  prediction: { data_type: string; semantic_type: string | null } | null;
  answers: TermPayload[];
  dropped: TermPayload[];
  plans: PlanPayload[];
  pgp: PgpPayload;
  agp: PgpPayload;
  timings: Record<string, number>;
  diagnostics: Record<string, number>;
  pipeline_diagnostics: string[];
}

export interface ExecutePayload {
  form: string;
  boolean?: boolean;
  variables?: string[];
  rows?: Record<string, { value: string; kind: string }>[];
}

export interface PlanRow {
  rank: number;
  form: string;
  scoreText: string;
  sparql: string;
  tripleCount: number;
  mainVar: string | null;
}

export function planRows(payload: AnswerPayload): PlanRow[] {
  return payload.plans.map((plan) => ({
    rank: plan.rank,
    form: plan.form,
    scoreText: String(plan.score),
    sparql: plan.sparql,
    tripleCount: plan.bgp.triples.length,
    mainVar: plan.main_var,
  }));
}

export interface AnswerBadge {
  value: string;
  badge: "kept" | "dropped";
  reason: string | null;
  classType: string | null;
  sourceRankText: string;
}

export function answerBadges(payload: AnswerPayload): AnswerBadge[] {
  const kept: AnswerBadge[] = payload.answers.map((answer) => ({
    value: answer.value,
    badge: "kept",
    reason: null,
    classType: answer.class_type,
    sourceRankText: String(answer.source_rank),
  }));
  const dropped: AnswerBadge[] = payload.dropped.map((answer) => ({
    value: answer.value,
    badge: "dropped",
    reason: answer.reason ?? null,
    classType: answer.class_type,
    sourceRankText: String(answer.source_rank),
  }));
  return kept.concat(dropped);
}

export interface TimingSegment {
  phase: string;
  label: string;
  secondsText: string;
  fraction: number;
}

const PHASE_LABELS: Record<string, string> = {
  qu: "QU",
  linking: "Linking",
  execution_filtration: "Execution & Filtration",
};

export function timingSegments(payload: AnswerPayload): TimingSegment[] {
  const phases = ["qu", "linking", "execution_filtration"];
  const total = payload.timings["total"] ?? 0;
  return phases.map((phase) => {
    const seconds = payload.timings[phase] ?? 0;
    return {
      phase,
      label: PHASE_LABELS[phase] ?? phase,
      secondsText: String(seconds),
      fraction: total > 0 ? seconds / total : 0,
    };
  });
}

/** Answer values from a raw /api/execute response, for plan what-if runs. */
export function executeValues(payload: ExecutePayload, mainVar: string | null): string[] {
  if (payload.form === "ask") {
    return [String(payload.boolean)];
  }
  const variable = (mainVar ?? "?unknown1").replace(/^\?/, "");
  const values: string[] = [];
  for (const row of payload.rows ?? []) {
    const term = row[variable];
    if (term !== undefined && !values.includes(term.value)) {
      values.push(term.value);
    }
  }
  return values;
}

/** True when a what-if run reproduces the pipeline's kept answers. */
export function matchesPipelineAnswers(
  answer: AnswerPayload,
  execute: ExecutePayload,
  mainVar: string | null,
): boolean {
  const expected = new Set(answer.answers.map((a) => a.value));
  const actual = new Set(executeValues(execute, mainVar));
  if (expected.size !== actual.size) return false;
  for (const value of expected) {
    if (!actual.has(value)) return false;
  }
  return true;
}

// --- PGP diagram layout --------------------------------------------------------

export interface DiagramNode {
  id: string;
  label: string;
  kind: string;
  isMain: boolean;
  x: number;
  y: number;
  annotation: string | null;
}

export interface DiagramEdge {
  label: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  annotation: string | null;
}

export interface DiagramLayout {
  nodes: DiagramNode[];
  edges: DiagramEdge[];
}

/** Circular node-link layout; annotations show the top-ranked linked IRI. */
export function pgpLayout(pgp: PgpPayload, width: number, height: number): DiagramLayout {
  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.max(40, Math.min(width, height) / 2 - 60);
  const nodes: DiagramNode[] = pgp.nodes.map((node, i) => {
    const angle = (2 * Math.PI * i) / pgp.nodes.length - Math.PI / 2;
    const top = node.relevant_vertices[0];
    return {
      id: node.id,
      label: node.label || node.id,
      kind: node.kind,
      isMain: node.is_main,
      x: pgp.nodes.length === 1 ? cx : cx + radius * Math.cos(angle),
      y: pgp.nodes.length === 1 ? cy : cy + radius * Math.sin(angle),
      annotation: top ? top.iri : null,
    };
  });
  const byId = new Map(nodes.map((n) => [n.id, n]));
  const edges: DiagramEdge[] = pgp.edges.map((edge) => {
    const a = byId.get(edge.endpoint_a);
    const b = byId.get(edge.endpoint_b);
    const top = edge.relevant_predicates[0];
    return {
      label: edge.label,
      x1: a?.x ?? cx,
      y1: a?.y ?? cy,
      x2: b?.x ?? cx,
      y2: b?.y ?? cy,
      annotation: top ? top.iri : null,
    };
  });
  return { nodes, edges };
}

export interface PhaseErrorDetail {
  phase: string;
  message: string;
}

export function phaseErrorFromBody(body: unknown): PhaseErrorDetail {
  if (body && typeof body === "object" && "detail" in body) {
    const detail = (body as { detail: unknown }).detail;
    if (detail && typeof detail === "object" && "phase" in detail && "message" in detail) {
      return detail as PhaseErrorDetail;
    }
    return { phase: "request", message: String(detail) };
  }
  return { phase: "request", message: "request failed" };
}
