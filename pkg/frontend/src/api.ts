/* Typed client for the hiercolor REST service.
 *
 * The explorer consumes the service verbatim: every color shown in the UI
 * originates from one of these payloads and is never recomputed locally.
 */

export interface LchTriple {
  L: number;
  C: number;
  h: number;
}

/** One visible node row from the session palette, in tree order. */
export interface NodeRow {
  id: string;
  label: string;
  parent: string | null;
  depth: number;
  color: LchTriple;
  hex: string;
  expanded: boolean;
  has_children: boolean;
}

export interface SessionPalette {
  session_id: string;
  mode: string;
  seed: number;
  rng: string;
  nodes: NodeRow[];
  warnings?: string[];
}

export interface PaletteEntry {
  class: string;
  color: LchTriple;
  hex: string;
}

/** Reserved child range recorded when a node's container was expanded. */
export interface SphereRange {
  class: string;
  center: [number, number, number] | null;
  radius: number | null;
  hue_interval: [number, number] | null;
  anchor_delta: number;
  anchor: LchTriple;
}

export interface ExpandResponse {
  session_id: string;
  node_id: string;
  rng: string;
  children: PaletteEntry[];
  ranges: SphereRange[];
  warnings: string[];
}

/** Palette scores; ss and dr only appear on hierarchical evaluations. */
export interface MetricReport {
  pd: number;
  nd: number;
  hue: number;
  cl: number;
  bhdi: number;
  ss?: number;
  dr?: number;
}

export interface EvaluationLevel {
  context: string;
  classes: string[];
  report: MetricReport;
}

export interface EvaluationPayload {
  session_id: string;
  rng: string;
  levels: EvaluationLevel[];
  frontier?: MetricReport;
}

/** Hierarchy tree in the service's input schema. */
export interface HierarchyInput {
  id: string;
  label?: string;
  children?: HierarchyInput[];
}

export interface LayoutSample {
  id: string;
  pos: [number, number];
  label: string;
  features?: number[];
}

export interface LayoutInput {
  kind: string;
  samples: LayoutSample[];
}

export interface CreateSessionRequest {
  hierarchy: HierarchyInput;
  layout?: LayoutInput | null;
  mode?: string;
  seed?: number | null;
  config?: Record<string, unknown> | null;
}

/** Raised for any non-2xx service response, carrying the HTTP status. */
export class ServiceError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ServiceError";
  }
}

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
  } catch {
    /* non-JSON error body; fall through to the status line */
  }
  return `${response.status} ${response.statusText}`;
}

export class ExplorerClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw new ServiceError(response.status, await errorDetail(response));
    }
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  createSession(request: CreateSessionRequest): Promise<SessionPalette> {
    return this.request("POST", "/sessions", request);
  }

  expand(sessionId: string, nodeId: string): Promise<ExpandResponse> {
    return this.request("POST", `/sessions/${sessionId}/expand`, {
      node_id: nodeId,
    });
  }

  palette(sessionId: string): Promise<SessionPalette> {
    return this.request("GET", `/sessions/${sessionId}/palette`);
  }

  evaluation(sessionId: string): Promise<EvaluationPayload> {
    return this.request("GET", `/sessions/${sessionId}/evaluation`);
  }

  async remove(sessionId: string): Promise<void> {
    await this.request("DELETE", `/sessions/${sessionId}`);
  }
}
