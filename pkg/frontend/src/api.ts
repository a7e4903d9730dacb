/**
 * Typed client for the atlas HTTP API. This module is the only place the
 * reader talks to the network; everything else consumes the returned
 * payloads as plain data.
 */

export interface LibraryEntry {
  urn: string;
  label: string;
  language: string;
  row_count: number;
}

export interface TokenPayload {
  ve_ref: string;
  value: string;
  kind: string;
  start: number;
  end: number;
}

export interface TextPart {
  ref: string;
  text: string;
  tokens: TokenPayload[];
}

export interface PassageMetadata {
  label: string;
  language: string;
  citation_scheme: string[];
}

export interface PassagePayload {
  urn: string;
  metadata: PassageMetadata;
  text_parts: TextPart[];
  prev: string | null;
  next: string | null;
}

export interface AnnotationEnvelope {
  kind: string;
  urn: string | null;
  data: Record<string, unknown>;
}

export interface ErrorBody {
  error: string;
  detail: string;
}

/** A non-2xx response, carrying the server's JSON error body. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ErrorBody,
  ) {
    super(`${body.error}: ${body.detail}`);
    this.name = "ApiError";
  }
}

// Shallow shape check so obviously broken input never reaches the server;
// the server stays the authority on everything beyond "looks like urn:cts:".
const CTS_SHAPE = /^urn:cts:[^:\s]+:[^:\s]+(:[^:\s]*)?$/u;

export function looksLikeCtsUrn(text: string): boolean {
  return CTS_SHAPE.test(text);
}

/** First four colon-separated components: the version-level URN. */
export function versionOf(urn: string): string {
  return urn.split(":").slice(0, 4).join(":");
}

/** The passage component (fifth colon field), or null when absent. */
export function passageOf(urn: string): string | null {
  const parts = urn.split(":");
  return parts.length > 4 ? parts.slice(4).join(":") : null;
}

async function errorBodyOf(response: Response): Promise<ErrorBody> {
  try {
    const body: unknown = await response.json();
    if (
      body !== null &&
      typeof body === "object" &&
      typeof (body as ErrorBody).error === "string" &&
      typeof (body as ErrorBody).detail === "string"
    ) {
      return body as ErrorBody;
    }
  } catch {
    // fall through to the generic body
  }
  return { error: "HttpError", detail: `status ${response.status}` };
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  async library(): Promise<LibraryEntry[]> {
    return (await this.get("/api/library")) as LibraryEntry[];
  }

  async passage(urn: string): Promise<PassagePayload> {
    return (await this.get(`/api/passages/${urn}`)) as PassagePayload;
  }

  async annotations(urn: string, kind?: string): Promise<AnnotationEnvelope[]> {
    const params: Record<string, string> = { urn };
    if (kind !== undefined) params.kind = kind;
    return (await this.get("/api/annotations", params)) as AnnotationEnvelope[];
  }

  private async get(
    path: string,
    params?: Record<string, string>,
  ): Promise<unknown> {
    let url = this.baseUrl + path;
    if (params) {
      url += "?" + new URLSearchParams(params).toString();
    }
    const response = await fetch(url);
    if (!response.ok) {
      throw new ApiError(response.status, await errorBodyOf(response));
    }
    return response.json();
  }
}
