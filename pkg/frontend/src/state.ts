/**
 * Reader state and its transitions. Transitions are pure functions guarded
 * by facts about the loaded passage, so the two invariants hold by
 * construction: a selected token always belongs to the current passage, and
 * metrical mode is only reachable when sub-token spans exist for it.
 */

export type DisplayMode = "default" | "interlinear" | "metrical";

export const DISPLAY_MODES: readonly DisplayMode[] = [
  "default",
  "interlinear",
  "metrical",
];

export type LayerName =
  | "transliteration"
  | "lemma"
  | "relation"
  | "morph-tag"
  | "grammar-tag"
  | "gloss-1"
  | "gloss-2";

/** Display order of interlinear rows under each token. */
export const LAYER_ORDER: readonly LayerName[] = [
  "transliteration",
  "lemma",
  "relation",
  "morph-tag",
  "grammar-tag",
  "gloss-1",
  "gloss-2",
];

export interface ReaderState {
  readonly passageUrn: string | null;
  readonly mode: DisplayMode;
  readonly selectedVeRef: string | null;
  readonly visibleLayers: ReadonlySet<LayerName>;
  readonly pairedVersion: string | null;
}

/** What the guards need to know about the passage currently on screen. */
export interface PassageFacts {
  readonly veRefs: ReadonlySet<string>;
  readonly metricalAvailable: boolean;
}

export const NO_PASSAGE: PassageFacts = {
  veRefs: new Set(),
  metricalAvailable: false,
};

export function initialState(): ReaderState {
  return {
    passageUrn: null,
    mode: "default",
    selectedVeRef: null,
    visibleLayers: new Set(LAYER_ORDER),
    pairedVersion: null,
  };
}

export function withPassage(
  state: ReaderState,
  urn: string,
  facts: PassageFacts,
): ReaderState {
  const selected =
    state.selectedVeRef !== null && facts.veRefs.has(state.selectedVeRef)
      ? state.selectedVeRef
      : null;
  const mode =
    state.mode === "metrical" && !facts.metricalAvailable
      ? "default"
      : state.mode;
  return { ...state, passageUrn: urn, selectedVeRef: selected, mode };
}

export function withSelection(
  state: ReaderState,
  veRef: string | null,
  facts: PassageFacts,
): ReaderState {
  if (veRef !== null && !facts.veRefs.has(veRef)) {
    return state;
  }
  return { ...state, selectedVeRef: veRef };
}

export function withMode(
  state: ReaderState,
  mode: DisplayMode,
  facts: PassageFacts,
): ReaderState {
  if (mode === "metrical" && !facts.metricalAvailable) {
    return state;
  }
  return { ...state, mode };
}

export function withLayer(
  state: ReaderState,
  layer: LayerName,
  visible: boolean,
): ReaderState {
  const layers = new Set(state.visibleLayers);
  if (visible) {
    layers.add(layer);
  } else {
    layers.delete(layer);
  }
  return { ...state, visibleLayers: layers };
}

export function withPairedVersion(
  state: ReaderState,
  versionUrn: string | null,
): ReaderState {
  return { ...state, pairedVersion: versionUrn };
}

type Listener = (state: ReaderState) => void;

/**
 * One store serializes every update: apply() runs transitions in call
 * order and notifies subscribers after each, so concurrent fetch
 * completions cannot interleave half-applied states.
 */
export class StateStore {
  private state: ReaderState = initialState();
  private listeners: Listener[] = [];

  get(): ReaderState {
    return this.state;
  }

  apply(transition: (state: ReaderState) => ReaderState): ReaderState {
    this.state = transition(this.state);
    for (const listener of [...this.listeners]) {
      listener(this.state);
    }
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((entry) => entry !== listener);
    };
  }
}
