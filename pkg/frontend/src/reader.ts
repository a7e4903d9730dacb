/**
 * The reading environment: one instance owns the state store, the loaded
 * payloads, and the root element it renders into. Every operation funnels
 * through update() so renders always reflect a single consistent state.
 */

import {
  AnnotationEnvelope,
  ApiClient,
  ApiError,
  ErrorBody,
  looksLikeCtsUrn,
  PassagePayload,
  passageOf,
} from "./api.js";
import { AudioPlayer, HtmlAudioPlayer } from "./audio.js";
import { HoverKey, RenderHandlers, renderReader } from "./render.js";
import {
  DisplayMode,
  LayerName,
  NO_PASSAGE,
  PassageFacts,
  ReaderState,
  StateStore,
  withLayer,
  withMode,
  withPairedVersion,
  withPassage,
  withSelection,
} from "./state.js";
import { uiString } from "./strings.js";
import { buildPassageView, mergeGlossLayer, PassageView } from "./viewmodel.js";

export class Reader {
  private readonly store = new StateStore();
  private passage: PassagePayload | null = null;
  private envelopes: AnnotationEnvelope[] = [];
  private view: PassageView | null = null;
  private paired: PassagePayload | null = null;
  private hovered: HoverKey | null = null;
  private error: ErrorBody | null = null;
  private status: string | null = null;
  private loadSeq = 0;
  private readonly changeListeners: Array<() => void> = [];
  private readonly handlers: RenderHandlers;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly audio: AudioPlayer = new HtmlAudioPlayer(),
  ) {
    this.handlers = {
      onSelect: (veRef) => this.selectToken(veRef),
      onHoverEnter: (version, veRef) => this.hoverToken(version, veRef),
      onHoverLeave: () => this.clearHover(),
      onAudio: (ref) => {
        void this.playAudio(ref);
      },
    };
  }

  get state(): ReaderState {
    return this.store.get();
  }

  get passageView(): PassageView | null {
    return this.view;
  }

  get currentPassage(): PassagePayload | null {
    return this.passage;
  }

  get pairedPassage(): PassagePayload | null {
    return this.paired;
  }

  get lastError(): ErrorBody | null {
    return this.error;
  }

  get statusText(): string | null {
    return this.status;
  }

  get metricalAvailable(): boolean {
    return this.view?.metricalAvailable ?? false;
  }

  onChange(listener: () => void): () => void {
    this.changeListeners.push(listener);
    return () => {
      const index = this.changeListeners.indexOf(listener);
      if (index >= 0) this.changeListeners.splice(index, 1);
    };
  }

  async loadPassage(urnText: string): Promise<void> {
    const urn = urnText.trim();
    if (!looksLikeCtsUrn(urn)) {
      this.error = { error: "MalformedUrn", detail: uiString("malformedUrn") };
      this.render();
      return;
    }
    const seq = ++this.loadSeq;
    this.status = uiString("loading");
    this.render();
    try {
      const [passage, envelopes] = await Promise.all([
        this.api.passage(urn),
        this.api.annotations(urn),
      ]);
      if (seq !== this.loadSeq) return;
      this.passage = passage;
      this.envelopes = envelopes;
      this.error = null;
      this.status = null;
      this.hovered = null;
      await this.refreshPaired(seq);
      if (seq !== this.loadSeq) return;
      this.rebuildView();
      this.store.apply((state) => withPassage(state, urn, this.facts()));
    } catch (err) {
      if (seq !== this.loadSeq) return;
      this.status = null;
      this.error = this.errorBody(err);
    }
    this.render();
  }

  selectToken(veRef: string): void {
    const current = this.store.get().selectedVeRef;
    this.store.apply((state) =>
      withSelection(state, current === veRef ? null : veRef, this.facts()),
    );
    this.render();
  }

  clearSelection(): void {
    this.store.apply((state) => withSelection(state, null, this.facts()));
    this.render();
  }

  hoverToken(version: string, veRef: string): void {
    if (this.store.get().pairedVersion === null) return;
    this.hovered = { version, veRef };
    this.render();
  }

  clearHover(): void {
    if (this.hovered === null) return;
    this.hovered = null;
    this.render();
  }

  setMode(mode: DisplayMode): void {
    this.store.apply((state) => withMode(state, mode, this.facts()));
    this.render();
  }

  setLayerVisible(layer: LayerName, visible: boolean): void {
    this.store.apply((state) => withLayer(state, layer, visible));
    this.render();
  }

  async setPairedVersion(versionUrn: string | null): Promise<void> {
    this.store.apply((state) => withPairedVersion(state, versionUrn));
    const seq = this.loadSeq;
    await this.refreshPaired(seq);
    if (seq !== this.loadSeq) return;
    this.rebuildView();
    this.render();
  }

  async playAudio(ref: string): Promise<void> {
    const url = this.view?.audioByRef.get(ref);
    if (url === undefined) return;
    try {
      await this.audio.play(url);
    } catch (err) {
      const detail = err instanceof Error ? err.message : String(err);
      this.status = `${uiString("audioFailed")}: ${detail}`;
      this.render();
    }
  }

  private facts(): PassageFacts {
    if (this.view === null) return NO_PASSAGE;
    return {
      veRefs: this.view.veRefs,
      metricalAvailable: this.view.metricalAvailable,
    };
  }

  private errorBody(err: unknown): ErrorBody {
    if (err instanceof ApiError) return err.body;
    const detail = err instanceof Error ? err.message : String(err);
    return { error: "RequestFailed", detail };
  }

  private rebuildView(): void {
    if (this.passage === null) {
      this.view = null;
      return;
    }
    const view = buildPassageView(this.passage, this.envelopes);
    if (this.paired !== null) {
      mergeGlossLayer(view, this.paired);
    }
    this.view = view;
  }

  // The paired column shows the same passage reference in the paired
  // version; a version without that passage just leaves the column empty.
  private async refreshPaired(seq: number): Promise<void> {
    const pairedVersion = this.store.get().pairedVersion;
    if (pairedVersion === null || this.passage === null) {
      this.paired = null;
      return;
    }
    const passage = passageOf(this.passage.urn) ?? "";
    try {
      const payload = await this.api.passage(`${pairedVersion}:${passage}`);
      if (seq !== this.loadSeq) return;
      this.paired = payload;
    } catch (err) {
      if (seq !== this.loadSeq) return;
      this.paired = null;
      if (err instanceof ApiError) {
        this.status = uiString("pairedUnavailable");
      } else {
        this.status = this.errorBody(err).detail;
      }
    }
  }

  private render(): void {
    renderReader(
      this.root,
      {
        state: this.store.get(),
        passage: this.passage,
        view: this.view,
        paired: this.paired,
        hovered: this.hovered,
        error: this.error,
        status: this.status,
      },
      this.handlers,
    );
    for (const listener of [...this.changeListeners]) {
      listener();
    }
  }
}
