/**
 * All user-facing chrome strings live in this one table so the UI can be
 * localized by swapping it out. English defaults.
 */
export const UI_STRINGS = {
  loadButton: "Load",
  passagePlaceholder: "urn:cts:greekLit:tlg0012.tlg001.perseus-grc2:1.1-1.7",
  loading: "Loading…",
  malformedUrn: "Not a CTS passage URN",
  serverErrorTitle: "The server reported an error",
  panelTitle: "Annotations",
  panelEmpty: "No annotations for this token",
  witnessesLabel: "Witnesses",
  dictionaryLabel: "Dictionary",
  modeDefault: "Default",
  modeInterlinear: "Interlinear",
  modeMetrical: "Metrical",
  layersLabel: "Layers",
  pairedLabel: "Paired translation",
  pairedNone: "None",
  pairedUnavailable: "The paired version has no matching passage",
  audioPlay: "Play audio",
  audioFailed: "Audio playback failed",
} as const;

export type StringKey = keyof typeof UI_STRINGS;

export function uiString(key: StringKey): string {
  return UI_STRINGS[key];
}
