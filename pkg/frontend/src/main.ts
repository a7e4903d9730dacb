/** Boot: build the control bar, mount the reader, wire the widgets. */

import { ApiClient, versionOf } from "./api.js";
import { Reader } from "./reader.js";
import {
  DISPLAY_MODES,
  DisplayMode,
  LAYER_ORDER,
  LayerName,
} from "./state.js";
import { uiString } from "./strings.js";

const MODE_LABELS: Record<DisplayMode, string> = {
  default: uiString("modeDefault"),
  interlinear: uiString("modeInterlinear"),
  metrical: uiString("modeMetrical"),
};

export function initReader(root: HTMLElement, baseUrl = ""): Reader {
  const api = new ApiClient(baseUrl);

  const controls = document.createElement("div");
  controls.className = "reader-controls";

  const urnInput = document.createElement("input");
  urnInput.type = "text";
  urnInput.className = "urn-input";
  urnInput.placeholder = uiString("passagePlaceholder");
  controls.append(urnInput);

  const loadButton = document.createElement("button");
  loadButton.className = "load-btn";
  loadButton.textContent = uiString("loadButton");
  controls.append(loadButton);

  const modeBar = document.createElement("div");
  modeBar.className = "mode-bar";
  const modeButtons = new Map<DisplayMode, HTMLButtonElement>();
  for (const mode of DISPLAY_MODES) {
    const button = document.createElement("button");
    button.className = `mode-btn mode-${mode}`;
    button.textContent = MODE_LABELS[mode];
    button.addEventListener("click", () => reader.setMode(mode));
    modeButtons.set(mode, button);
    modeBar.append(button);
  }
  controls.append(modeBar);

  const layerBar = document.createElement("div");
  layerBar.className = "layer-bar";
  layerBar.append(
    Object.assign(document.createElement("span"), {
      textContent: uiString("layersLabel"),
    }),
  );
  for (const layer of LAYER_ORDER) {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = true;
    box.dataset.layer = layer;
    box.addEventListener("change", () =>
      reader.setLayerVisible(layer as LayerName, box.checked),
    );
    label.append(box, document.createTextNode(layer));
    layerBar.append(label);
  }
  controls.append(layerBar);

  const pairedSelect = document.createElement("select");
  pairedSelect.className = "paired-select";
  const none = document.createElement("option");
  none.value = "";
  none.textContent = uiString("pairedNone");
  pairedSelect.append(none);
  pairedSelect.addEventListener("change", () => {
    void reader.setPairedVersion(
      pairedSelect.value === "" ? null : pairedSelect.value,
    );
  });
  controls.append(pairedSelect);

  const mount = document.createElement("div");
  mount.className = "reader-mount";
  root.replaceChildren(controls, mount);

  const reader = new Reader(mount, api);

  loadButton.addEventListener("click", () => {
    void reader.loadPassage(urnInput.value);
  });
  urnInput.addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") {
      void reader.loadPassage(urnInput.value);
    }
  });

  reader.onChange(() => {
    const metrical = modeButtons.get("metrical");
    if (metrical) metrical.disabled = !reader.metricalAvailable;
    const current = reader.state.passageUrn;
    if (current !== null && urnInput.value === "") {
      urnInput.value = current;
    }
  });

  void api
    .library()
    .then((entries) => {
      for (const entry of entries) {
        const option = document.createElement("option");
        option.value = versionOf(entry.urn);
        option.textContent = entry.label || entry.urn;
        pairedSelect.append(option);
      }
    })
    .catch(() => {
      // The picker stays empty when the library is unreachable; passage
      // loads will surface the error in the reader itself.
    });

  return reader;
}

const autoMount = document.getElementById("atlas-reader");
if (autoMount !== null) {
  initReader(autoMount, autoMount.dataset.apiBase ?? "");
}
