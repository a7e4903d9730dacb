/**
 * Test scaffolding: recorded server responses and a fetch stub that serves
 * them. The fixture file is captured from a live atlas server by
 * scripts/record-fixtures.sh, so every payload the tests see is a genuine
 * API response.
 */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import {
  AnnotationEnvelope,
  PassagePayload,
} from "../src/api.js";

export interface RecordedResponse {
  path: string;
  params?: Record<string, string>;
  status: number;
  json: unknown;
}

const here = dirname(fileURLToPath(import.meta.url));

export const RECORDED: RecordedResponse[] = JSON.parse(
  readFileSync(join(here, "fixtures", "responses.json"), "utf8"),
) as RecordedResponse[];

export const GRC = "urn:cts:greekLit:tlg0012.tlg001.perseus-grc2";
export const ENG = "urn:cts:greekLit:tlg0012.tlg001.parrish-eng1";
export const THUC = "urn:cts:greekLit:tlg0003.tlg001.perseus-grc2";

function paramsMatch(
  recorded: Record<string, string> | undefined,
  actual: URLSearchParams,
): boolean {
  const expected = recorded ?? {};
  const keys = [...actual.keys()];
  if (keys.length !== Object.keys(expected).length) return false;
  return keys.every((key) => expected[key] === actual.get(key));
}

export function recordedEntry(
  path: string,
  params?: Record<string, string>,
): RecordedResponse {
  for (const entry of RECORDED) {
    if (entry.path !== path) continue;
    const search = new URLSearchParams(params ?? {});
    if (paramsMatch(entry.params, search)) return entry;
  }
  throw new Error(`no recorded response for ${path} ${JSON.stringify(params)}`);
}

export function recordedPassage(urn: string): PassagePayload {
  return recordedEntry(`/api/passages/${urn}`).json as PassagePayload;
}

export function recordedAnnotations(urn: string): AnnotationEnvelope[] {
  return recordedEntry("/api/annotations", { urn }).json as AnnotationEnvelope[];
}

export interface FetchStub {
  requests: string[];
  restore(): void;
}

/**
 * Replace global fetch with a resolver over the recorded responses. An
 * unrecorded URL comes back 500 so a test that strays off the fixture set
 * fails visibly instead of hanging.
 */
export function installFetchStub(): FetchStub {
  const original = globalThis.fetch;
  const requests: string[] = [];
  globalThis.fetch = async (input: RequestInfo | URL): Promise<Response> => {
    const url = new URL(String(input), "http://fixture.local");
    requests.push(url.pathname + url.search);
    for (const entry of RECORDED) {
      if (decodeURIComponent(url.pathname) !== entry.path) continue;
      if (!paramsMatch(entry.params, url.searchParams)) continue;
      return new Response(JSON.stringify(entry.json), {
        status: entry.status,
        headers: { "content-type": "application/json" },
      });
    }
    return new Response(
      JSON.stringify({ error: "Unrecorded", detail: url.toString() }),
      { status: 500, headers: { "content-type": "application/json" } },
    );
  };
  return {
    requests,
    restore: () => {
      globalThis.fetch = original;
    },
  };
}

export function freshRoot(): HTMLElement {
  const root = document.createElement("div");
  document.body.replaceChildren(root);
  return root;
}

/** All primary-column token elements in document order. */
export function primaryTokens(root: HTMLElement): HTMLElement[] {
  return [...root.querySelectorAll<HTMLElement>(".passage.primary .token")];
}

export function tokenEl(
  root: HTMLElement,
  column: "primary" | "paired",
  veRef: string,
): HTMLElement {
  const node = root.querySelector<HTMLElement>(
    `.passage.${column} .token[data-ve-ref="${veRef}"]`,
  );
  if (!node) throw new Error(`no ${column} token ${veRef}`);
  return node;
}
