/**
 * DOM construction. The whole view is rebuilt from the current state on
 * every change; no incremental patching, so a select/deselect round trip
 * reproduces the previous render exactly.
 */

import { ErrorBody, PassagePayload, TextPart, versionOf } from "./api.js";
import { LAYER_ORDER, ReaderState } from "./state.js";
import { uiString } from "./strings.js";
import { memberKey, PassageView } from "./viewmodel.js";

export interface HoverKey {
  version: string;
  veRef: string;
}

export interface RenderContext {
  state: ReaderState;
  passage: PassagePayload | null;
  view: PassageView | null;
  paired: PassagePayload | null;
  hovered: HoverKey | null;
  error: ErrorBody | null;
  status: string | null;
}

export interface RenderHandlers {
  onSelect(veRef: string): void;
  onHoverEnter(version: string, veRef: string): void;
  onHoverLeave(): void;
  onAudio(ref: string): void;
}

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function partRefOf(veRef: string): string {
  return veRef.replace(/\.t\d+$/u, "");
}

/** Tokens the current hover should light up on the far side of its groups. */
function hoverCounterparts(
  hovered: HoverKey | null,
  view: PassageView,
): Set<string> {
  const keys = new Set<string>();
  if (hovered === null) return keys;
  const groups = view.alignmentByMember.get(
    memberKey(hovered.version, hovered.veRef),
  );
  if (!groups) return keys;
  for (const group of groups) {
    for (const side of group.sides) {
      for (const member of side) {
        if (member.version === hovered.version) continue;
        keys.add(memberKey(member.version, member.veRef));
      }
    }
  }
  return keys;
}

function grammarCoSet(state: ReaderState, view: PassageView): Set<string> {
  const co = new Set<string>();
  if (state.selectedVeRef === null) return co;
  const entries = view.grammarByVeRef.get(state.selectedVeRef);
  if (!entries) return co;
  for (const entry of entries) {
    for (const veRef of entry.veRefs) {
      if (veRef !== state.selectedVeRef) co.add(veRef);
    }
  }
  return co;
}

interface ColumnOptions {
  version: string;
  primary: boolean;
  ctx: RenderContext;
  view: PassageView;
  handlers: RenderHandlers;
  hoverSet: Set<string>;
  coSet: Set<string>;
  unalignedActive: boolean;
}

function renderToken(
  part: TextPart,
  index: number,
  opts: ColumnOptions,
): HTMLElement {
  const token = part.tokens[index]!;
  const { ctx, view, handlers } = opts;
  const span = el("span", `token kind-${token.kind}`);
  span.textContent = part.text.slice(token.start, token.end);
  span.dataset.veRef = token.ve_ref;
  span.dataset.version = opts.version;
  const key = memberKey(opts.version, token.ve_ref);
  if (opts.primary) {
    if (view.commented.has(token.ve_ref)) span.classList.add("has-comment");
    if (view.grammarByVeRef.has(token.ve_ref)) span.classList.add("has-grammar");
    if (ctx.state.selectedVeRef === token.ve_ref) span.classList.add("selected");
    if (opts.coSet.has(token.ve_ref)) span.classList.add("grammar-co");
    span.addEventListener("click", () => handlers.onSelect(token.ve_ref));
  }
  if (ctx.hovered !== null &&
      ctx.hovered.version === opts.version &&
      ctx.hovered.veRef === token.ve_ref) {
    span.classList.add("align-source");
  }
  if (opts.hoverSet.has(key)) span.classList.add("align-hover");
  if (
    opts.unalignedActive &&
    token.kind === "word" &&
    !view.alignmentByMember.has(key)
  ) {
    span.classList.add("unaligned");
  }
  span.addEventListener("mouseenter", () =>
    handlers.onHoverEnter(opts.version, token.ve_ref),
  );
  span.addEventListener("mouseleave", () => handlers.onHoverLeave());
  return span;
}

function renderLine(part: TextPart, opts: ColumnOptions): HTMLElement {
  const line = el("div", "line");
  const interlinear = opts.primary && opts.ctx.state.mode === "interlinear";
  let cursor = 0;
  part.tokens.forEach((token, index) => {
    if (token.start > cursor) {
      line.append(document.createTextNode(part.text.slice(cursor, token.start)));
    }
    const tokenEl = renderToken(part, index, opts);
    if (interlinear) {
      const cell = el("span", "token-cell");
      cell.append(tokenEl);
      const values = opts.view.layers.get(token.ve_ref);
      for (const layer of LAYER_ORDER) {
        if (!opts.ctx.state.visibleLayers.has(layer)) continue;
        const value = values?.get(layer);
        if (value === undefined) continue;
        const cellLayer = el("span", "layer", value);
        cellLayer.dataset.layer = layer;
        cell.append(cellLayer);
      }
      line.append(cell);
    } else {
      line.append(tokenEl);
    }
    cursor = token.end;
  });
  if (cursor < part.text.length) {
    line.append(document.createTextNode(part.text.slice(cursor)));
  }
  return line;
}

function renderMetricalLine(part: TextPart, view: PassageView): HTMLElement | null {
  const spans = view.metricalByRef.get(part.ref);
  if (!spans) return null;
  const line = el("div", "metrical-line");
  let cursor = 0;
  for (const span of spans) {
    if (span.start > cursor) {
      line.append(document.createTextNode(part.text.slice(cursor, span.start)));
    }
    if (span.start === span.end) {
      line.append(el("span", `metrical-mark ${span.label}`, "|"));
      continue;
    }
    const node = el(
      "span",
      `metrical-span ${span.label}`,
      part.text.slice(span.start, span.end),
    );
    if (span.group !== null) node.dataset.group = String(span.group);
    line.append(node);
    cursor = span.end;
  }
  if (cursor < part.text.length) {
    line.append(document.createTextNode(part.text.slice(cursor)));
  }
  return line;
}

function renderColumn(
  payload: PassagePayload,
  opts: ColumnOptions,
): HTMLElement {
  const section = el(
    "section",
    opts.primary ? "passage primary" : "passage paired",
  );
  for (const part of payload.text_parts) {
    const block = el("div", "text-part");
    block.dataset.ref = part.ref;
    const head = el("div", "part-head");
    head.append(el("span", "part-ref", part.ref));
    if (opts.primary) {
      const url = opts.view.audioByRef.get(part.ref);
      if (url !== undefined) {
        const button = el("button", "audio-btn", uiString("audioPlay"));
        button.dataset.ref = part.ref;
        button.addEventListener("click", () => opts.handlers.onAudio(part.ref));
        head.append(button);
      }
    }
    block.append(head);
    block.append(renderLine(part, opts));
    if (opts.primary && opts.ctx.state.mode === "metrical") {
      const metrical = renderMetricalLine(part, opts.view);
      if (metrical) block.append(metrical);
    }
    section.append(block);
  }
  return section;
}

function renderPanel(ctx: RenderContext, handlers: RenderHandlers): HTMLElement {
  const panel = el("aside", "detail-panel");
  const head = el("div", "panel-head");
  head.append(el("span", "panel-title", uiString("panelTitle")));
  const close = el("button", "panel-close", "×");
  close.addEventListener("click", () =>
    handlers.onSelect(ctx.state.selectedVeRef ?? ""),
  );
  head.append(close);
  panel.append(head);

  const veRef = ctx.state.selectedVeRef!;
  const view = ctx.view!;
  let count = 0;
  for (const note of view.notesByVeRef.get(veRef) ?? []) {
    const item = el("div", `panel-item ${note.kind}`);
    const body = el("div", "panel-body");
    body.innerHTML = note.html;
    item.append(body);
    if (note.witnesses.length > 0) {
      const list = el("ul", "witnesses");
      for (const witness of note.witnesses) {
        list.append(el("li", "witness", `${witness.value} ${witness.label}`));
      }
      item.append(el("div", "witnesses-label", uiString("witnessesLabel")));
      item.append(list);
    }
    panel.append(item);
    count += 1;
  }
  for (const entry of view.grammarByVeRef.get(veRef) ?? []) {
    const item = el("div", "panel-item grammar");
    item.append(el("div", "grammar-title", entry.title));
    const body = el("div", "panel-body");
    body.innerHTML = entry.bodyHtml;
    item.append(body);
    panel.append(item);
    count += 1;
  }
  for (const row of view.dictionaryByRef.get(partRefOf(veRef)) ?? []) {
    const item = el("div", "panel-item dictionary");
    item.append(el("span", "dict-headword", row.headword));
    item.append(
      el("span", "dict-sense", `${row.senseLabel} ${row.definition}`.trim()),
    );
    item.append(el("span", "dict-cite", row.citeRef));
    panel.append(item);
    count += 1;
  }
  if (count === 0) {
    panel.append(el("div", "panel-empty", uiString("panelEmpty")));
  }
  return panel;
}

export function renderReader(
  root: HTMLElement,
  ctx: RenderContext,
  handlers: RenderHandlers,
): void {
  const container = el("div", "reader-view");
  if (ctx.error !== null) {
    const banner = el("div", "error-panel");
    banner.append(el("div", "error-title", uiString("serverErrorTitle")));
    banner.append(
      el("div", "error-detail", `${ctx.error.error}: ${ctx.error.detail}`),
    );
    container.append(banner);
  }
  if (ctx.status !== null) {
    container.append(el("div", "status-line", ctx.status));
  }
  if (ctx.passage !== null && ctx.view !== null) {
    const hoverSet = hoverCounterparts(ctx.hovered, ctx.view);
    const coSet = grammarCoSet(ctx.state, ctx.view);
    const unalignedActive =
      ctx.state.pairedVersion !== null && ctx.view.alignmentGroups.length > 0;
    const columns = el("div", "columns");
    columns.append(
      renderColumn(ctx.passage, {
        version: ctx.view.versionUrn,
        primary: true,
        ctx,
        view: ctx.view,
        handlers,
        hoverSet,
        coSet,
        unalignedActive,
      }),
    );
    if (ctx.paired !== null) {
      columns.append(
        renderColumn(ctx.paired, {
          version: versionOf(ctx.paired.urn),
          primary: false,
          ctx,
          view: ctx.view,
          handlers,
          hoverSet,
          coSet,
          unalignedActive,
        }),
      );
    }
    container.append(columns);
    if (ctx.state.selectedVeRef !== null) {
      container.append(renderPanel(ctx, handlers));
    }
  }
  root.replaceChildren(container);
}
