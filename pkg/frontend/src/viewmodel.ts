/**
 * Per-passage view data assembled from server payloads. Everything here is
 * a reshaping of what the API returned: the server decides which records
 * overlap a passage, and each record's own target lists decide which tokens
 * light up. No overlap or containment logic lives on the client.
 */

import {
  AnnotationEnvelope,
  PassagePayload,
  passageOf,
  versionOf,
} from "./api.js";
import { LayerName } from "./state.js";

export interface WitnessView {
  value: string;
  label: string;
}

export interface NoteView {
  kind: string;
  html: string;
  fragment: string | null;
  witnesses: WitnessView[];
}

export interface GrammarEntryView {
  id: string;
  title: string;
  bodyHtml: string;
  veRefs: string[];
}

export interface AlignmentMember {
  version: string;
  veRef: string;
}

/** One aligned unit: a list of per-version token groups. */
export interface AlignmentGroup {
  sides: AlignmentMember[][];
}

export interface MetricalSpanView {
  start: number;
  end: number;
  label: string;
  group: number | null;
}

export interface DictionaryRowView {
  headword: string;
  senseLabel: string;
  definition: string;
  citeRef: string;
}

export interface PassageView {
  versionUrn: string;
  partRefs: Set<string>;
  veRefs: Set<string>;
  commented: Set<string>;
  notesByVeRef: Map<string, NoteView[]>;
  grammarEntries: Map<string, GrammarEntryView>;
  grammarByVeRef: Map<string, GrammarEntryView[]>;
  alignmentGroups: AlignmentGroup[];
  alignmentByMember: Map<string, AlignmentGroup[]>;
  layers: Map<string, Map<LayerName, string>>;
  availableLayers: Set<LayerName>;
  metricalByRef: Map<string, MetricalSpanView[]>;
  audioByRef: Map<string, string>;
  dictionaryByRef: Map<string, DictionaryRowView[]>;
  metricalAvailable: boolean;
}

export function memberKey(version: string, veRef: string): string {
  return `${version}|${veRef}`;
}

function asString(value: unknown): string | null {
  return typeof value === "string" ? value : null;
}

function asNumber(value: unknown): number | null {
  return typeof value === "number" && Number.isFinite(value) ? value : null;
}

function asArray(value: unknown): unknown[] {
  return Array.isArray(value) ? value : [];
}

function asRecord(value: unknown): Record<string, unknown> | null {
  return value !== null && typeof value === "object" && !Array.isArray(value)
    ? (value as Record<string, unknown>)
    : null;
}

function push<K, V>(map: Map<K, V[]>, key: K, value: V): void {
  const existing = map.get(key);
  if (existing) {
    existing.push(value);
  } else {
    map.set(key, [value]);
  }
}

function setLayer(
  view: PassageView,
  veRef: string,
  layer: LayerName,
  value: string,
): void {
  if (!view.veRefs.has(veRef) || value === "") return;
  let cell = view.layers.get(veRef);
  if (!cell) {
    cell = new Map();
    view.layers.set(veRef, cell);
  }
  if (!cell.has(layer)) {
    cell.set(layer, value);
    view.availableLayers.add(layer);
  }
}

// A commentary-family record lists its token targets as version-relative
// dotted refs; a bare integer means "token N of the record's reference".
function noteVeRefs(data: Record<string, unknown>): string[] {
  const refs: string[] = [];
  const references = asArray(data.references)
    .map(asString)
    .filter((r): r is string => r !== null);
  for (const entry of asArray(data.ve_refs)) {
    const text = asString(entry);
    if (text !== null) {
      refs.push(text);
      continue;
    }
    const index = asNumber(entry);
    if (index !== null) {
      for (const reference of references) {
        const passage = passageOf(reference);
        if (passage !== null) refs.push(`${passage}.t${index}`);
      }
    }
  }
  return refs;
}

function addNote(view: PassageView, envelope: AnnotationEnvelope): void {
  const html = asString(envelope.data.commentary) ?? "";
  const witnesses: WitnessView[] = [];
  for (const raw of asArray(envelope.data.witnesses)) {
    const witness = asRecord(raw);
    if (!witness) continue;
    witnesses.push({
      value: asString(witness.value) ?? "",
      label: asString(witness.label) ?? "",
    });
  }
  const note: NoteView = {
    kind: envelope.kind,
    html,
    fragment: asString(envelope.data.fragment),
    witnesses,
  };
  for (const veRef of noteVeRefs(envelope.data)) {
    if (!view.veRefs.has(veRef)) continue;
    view.commented.add(veRef);
    push(view.notesByVeRef, veRef, note);
  }
}

function addGrammar(view: PassageView, envelope: AnnotationEnvelope): void {
  const id = asString(envelope.data.entry_id);
  if (id === null) return;
  const entry: GrammarEntryView = {
    id,
    title: asString(envelope.data.title) ?? "",
    bodyHtml: asString(envelope.data.body_html) ?? "",
    veRefs: [],
  };
  for (const raw of asArray(envelope.data.targets)) {
    const target = asString(raw);
    if (target === null || versionOf(target) !== view.versionUrn) continue;
    const veRef = passageOf(target);
    if (veRef === null || !view.veRefs.has(veRef)) continue;
    entry.veRefs.push(veRef);
    push(view.grammarByVeRef, veRef, entry);
  }
  if (entry.veRefs.length > 0) {
    view.grammarEntries.set(id, entry);
  }
}

function addAlignment(view: PassageView, envelope: AnnotationEnvelope): void {
  const sides: AlignmentMember[][] = [];
  for (const rawSide of asArray(envelope.data.relations)) {
    const side: AlignmentMember[] = [];
    for (const raw of asArray(rawSide)) {
      const urn = asString(raw);
      if (urn === null) continue;
      const veRef = passageOf(urn);
      if (veRef === null) continue;
      side.push({ version: versionOf(urn), veRef });
    }
    sides.push(side);
  }
  if (sides.every((side) => side.length === 0)) return;
  const group: AlignmentGroup = { sides };
  view.alignmentGroups.push(group);
  for (const side of sides) {
    for (const member of side) {
      push(view.alignmentByMember, memberKey(member.version, member.veRef), group);
    }
  }
}

function addTreeLayers(view: PassageView, envelope: AnnotationEnvelope): void {
  const passages: string[] = [];
  for (const raw of asArray(envelope.data.references)) {
    const reference = asString(raw);
    if (reference === null || versionOf(reference) !== view.versionUrn) continue;
    const passage = passageOf(reference);
    if (passage !== null) passages.push(passage);
  }
  for (const raw of asArray(envelope.data.words)) {
    const word = asRecord(raw);
    if (!word) continue;
    const id = asNumber(word.id);
    if (id === null) continue;
    for (const passage of passages) {
      const veRef = `${passage}.t${id}`;
      setLayer(view, veRef, "lemma", asString(word.lemma) ?? "");
      setLayer(view, veRef, "relation", asString(word.relation) ?? "");
      setLayer(view, veRef, "morph-tag", asString(word.tag) ?? "");
    }
  }
}

function addConlluLayers(view: PassageView, envelope: AnnotationEnvelope): void {
  const ref = asString(envelope.data.ref);
  if (ref === null || !view.partRefs.has(ref)) return;
  for (const raw of asArray(envelope.data.tokens)) {
    const token = asRecord(raw);
    if (!token) continue;
    const index = asNumber(token.index);
    if (index === null) continue;
    const veRef = `${ref}.t${index}`;
    setLayer(view, veRef, "lemma", asString(token.lemma) ?? "");
    setLayer(view, veRef, "relation", asString(token.deprel) ?? "");
    setLayer(view, veRef, "morph-tag", asString(token.upos) ?? "");
  }
}

function addMetrical(view: PassageView, envelope: AnnotationEnvelope): void {
  const target = asString(envelope.data.ref);
  if (target === null || versionOf(target) !== view.versionUrn) return;
  const ref = passageOf(target);
  if (ref === null || !view.partRefs.has(ref)) return;
  const spans: MetricalSpanView[] = [];
  for (const raw of asArray(envelope.data.spans)) {
    const span = asRecord(raw);
    if (!span) continue;
    const start = asNumber(span.start);
    const end = asNumber(span.end);
    const label = asString(span.label);
    if (start === null || end === null || label === null) continue;
    spans.push({ start, end, label, group: asNumber(span.group) });
  }
  if (spans.length > 0) {
    view.metricalByRef.set(ref, spans);
  }
}

function addAudio(view: PassageView, envelope: AnnotationEnvelope): void {
  const target = asString(envelope.data.urn);
  const url = asString(envelope.data.media_url);
  if (target === null || url === null) return;
  if (versionOf(target) !== view.versionUrn) return;
  const ref = passageOf(target);
  if (ref === null || !view.partRefs.has(ref)) return;
  view.audioByRef.set(ref, url);
}

function addDictionary(view: PassageView, envelope: AnnotationEnvelope): void {
  const headword = asString(envelope.data.headword);
  if (headword === null) return;
  const body = asRecord(envelope.data.data);
  if (!body) return;
  const walk = (senses: unknown[]): void => {
    for (const raw of senses) {
      const sense = asRecord(raw);
      if (!sense) continue;
      const senseLabel = asString(sense.label) ?? "";
      const definition = asString(sense.definition) ?? "";
      for (const rawCitation of asArray(sense.citations)) {
        const citation = asRecord(rawCitation);
        const data = citation ? asRecord(citation.data) : null;
        if (!data) continue;
        const target = asString(data.urn);
        if (target === null || versionOf(target) !== view.versionUrn) continue;
        const ref = passageOf(target);
        if (ref === null || !view.partRefs.has(ref)) continue;
        push(view.dictionaryByRef, ref, {
          headword,
          senseLabel,
          definition,
          citeRef: asString(data.ref) ?? "",
        });
      }
      walk(asArray(sense.children));
    }
  };
  walk(asArray(body.senses));
}

export function buildPassageView(
  passage: PassagePayload,
  envelopes: AnnotationEnvelope[],
): PassageView {
  const view: PassageView = {
    versionUrn: versionOf(passage.urn),
    partRefs: new Set(),
    veRefs: new Set(),
    commented: new Set(),
    notesByVeRef: new Map(),
    grammarEntries: new Map(),
    grammarByVeRef: new Map(),
    alignmentGroups: [],
    alignmentByMember: new Map(),
    layers: new Map(),
    availableLayers: new Set(),
    metricalByRef: new Map(),
    audioByRef: new Map(),
    dictionaryByRef: new Map(),
    metricalAvailable: false,
  };
  for (const part of passage.text_parts) {
    view.partRefs.add(part.ref);
    for (const token of part.tokens) {
      view.veRefs.add(token.ve_ref);
    }
  }
  for (const envelope of envelopes) {
    switch (envelope.kind) {
      case "commentary":
      case "textual-note":
        addNote(view, envelope);
        break;
      case "grammar":
        addGrammar(view, envelope);
        break;
      case "alignment":
        addAlignment(view, envelope);
        break;
      case "syntax-tree":
        addTreeLayers(view, envelope);
        break;
      case "conllu":
        addConlluLayers(view, envelope);
        break;
      case "metrical":
        addMetrical(view, envelope);
        break;
      case "audio":
        addAudio(view, envelope);
        break;
      case "dictionary-citation":
        addDictionary(view, envelope);
        break;
      default:
        break;
    }
  }
  if (view.grammarByVeRef.size > 0) {
    for (const [veRef, entries] of view.grammarByVeRef) {
      setLayer(
        view,
        veRef,
        "grammar-tag",
        entries.map((entry) => entry.id).join(" "),
      );
    }
  }
  view.metricalAvailable = view.metricalByRef.size > 0;
  return view;
}

/**
 * Fill the gloss layer from the paired translation: each aligned token
 * shows its counterpart tokens' surface forms, in the paired passage's
 * document order.
 */
export function mergeGlossLayer(
  view: PassageView,
  pairedPassage: PassagePayload,
  layer: LayerName = "gloss-1",
): void {
  const pairedVersion = versionOf(pairedPassage.urn);
  const order = new Map<string, number>();
  const values = new Map<string, string>();
  let position = 0;
  for (const part of pairedPassage.text_parts) {
    for (const token of part.tokens) {
      order.set(token.ve_ref, position);
      values.set(token.ve_ref, token.value);
      position += 1;
    }
  }
  for (const veRef of view.veRefs) {
    const groups = view.alignmentByMember.get(
      memberKey(view.versionUrn, veRef),
    );
    if (!groups) continue;
    const counterparts: string[] = [];
    for (const group of groups) {
      for (const side of group.sides) {
        for (const member of side) {
          if (member.version !== pairedVersion) continue;
          if (!values.has(member.veRef)) continue;
          if (!counterparts.includes(member.veRef)) {
            counterparts.push(member.veRef);
          }
        }
      }
    }
    if (counterparts.length === 0) continue;
    counterparts.sort((a, b) => (order.get(a) ?? 0) - (order.get(b) ?? 0));
    setLayer(
      view,
      veRef,
      layer,
      counterparts.map((ref) => values.get(ref) ?? "").join(" "),
    );
  }
}
