import { fetchModelInfo, postPredict, SubmitOutcome } from "./api.js";
import { SERVICE_ORIGIN } from "./config.js";
import {
  FormState,
  buildFormFromModelInfo,
  clampToField,
  fieldNames,
  serializeRequest,
} from "./form.js";
import { HistoryEntry, describeDeltas, pushHistory } from "./history.js";
import { bandColor, formatBurnRate, gaugePercent } from "./render.js";
import { SubmitController } from "./submit.js";
import { FieldSpec, ModelInfo, isEnumField } from "./types.js";

interface Ui {
  info: ModelInfo;
  state: FormState;
  history: HistoryEntry[];
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className !== undefined) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function labelText(name: string): string {
  return name.replace(/_/g, " ");
}

function root(): HTMLElement {
  const node = document.getElementById("app");
  if (node === null) {
    throw new Error("missing #app mount point");
  }
  return node;
}

function renderFatalError(message: string): void {
  const mount = root();
  mount.replaceChildren();
  const panel = el("div", "fatal");
  panel.appendChild(el("h1", undefined, "Service unavailable"));
  panel.appendChild(el("p", undefined, message));
  const retry = el("button", undefined, "Retry");
  retry.addEventListener("click", () => {
    void init();
  });
  panel.appendChild(retry);
  mount.appendChild(panel);
}

function buildSliderControl(ui: Ui, field: FieldSpec, notify: () => void): HTMLElement {
  if (isEnumField(field)) {
    throw new Error("slider control needs a numeric field");
  }
  const group = el("div", "control");
  const label = el("label", undefined, labelText(field.name));
  label.htmlFor = `field-${field.name}`;
  const input = el("input");
  input.type = "range";
  input.id = `field-${field.name}`;
  input.min = String(field.min);
  input.max = String(field.max);
  input.step = String(field.step);
  input.value = String(ui.state.values[field.name]);
  const readout = el("span", "readout", String(ui.state.values[field.name]));
  input.addEventListener("input", () => {
    const value = clampToField(field, Number(input.value));
    ui.state.values[field.name] = value;
    readout.textContent = String(value);
    notify();
  });
  const errorSlot = el("div", "field-error");
  errorSlot.id = `error-${field.name}`;
  group.append(label, input, readout, errorSlot);
  return group;
}

function buildEnumControl(ui: Ui, field: FieldSpec, notify: () => void): HTMLElement {
  if (!isEnumField(field)) {
    throw new Error("dropdown control needs an enum field");
  }
  const group = el("div", "control");
  const label = el("label", undefined, labelText(field.name));
  label.htmlFor = `field-${field.name}`;
  const select = el("select");
  select.id = `field-${field.name}`;
  for (const value of field.values) {
    const option = el("option", undefined, value);
    option.value = value;
    select.appendChild(option);
  }
  select.value = String(ui.state.values[field.name]);
  select.addEventListener("change", () => {
    ui.state.values[field.name] = select.value;
    notify();
  });
  const errorSlot = el("div", "field-error");
  errorSlot.id = `error-${field.name}`;
  group.append(label, select, errorSlot);
  return group;
}

function renderFieldErrors(ui: Ui): void {
  for (const field of ui.info.fields) {
    const slot = document.getElementById(`error-${field.name}`);
    if (slot !== null) {
      slot.textContent = ui.state.fieldErrors[field.name] ?? "";
    }
  }
  const formSlot = document.getElementById("form-errors");
  if (formSlot !== null) {
    formSlot.textContent = ui.state.formErrors.join("; ");
  }
}

function renderResult(ui: Ui): void {
  const response = ui.state.lastResponse;
  const score = document.getElementById("score");
  const band = document.getElementById("band");
  const fill = document.getElementById("gauge-fill");
  if (score === null || band === null || fill === null) {
    return;
  }
  if (response === null) {
    score.textContent = "--";
    band.textContent = "";
    fill.style.width = "0%";
    return;
  }
  score.textContent = formatBurnRate(response.burn_rate);
  band.textContent = response.risk_band;
  const color = bandColor(response.risk_band, ui.info.band_names);
  band.style.color = color;
  fill.style.width = `${gaugePercent(response.burn_rate)}%`;
  fill.style.background = color;
}

function renderHistory(ui: Ui): void {
  const container = document.getElementById("history");
  if (container === null) {
    return;
  }
  container.replaceChildren();
  ui.history.forEach((entry, index) => {
    const previous = ui.history[index + 1] ?? null;
    const row = el("div", "history-row");
    const head = el("span", "history-score", formatBurnRate(entry.burnRate));
    head.style.color = bandColor(entry.riskBand, ui.info.band_names);
    row.appendChild(head);
    row.appendChild(el("span", "history-band", entry.riskBand));
    const deltas = describeDeltas(previous, entry);
    row.appendChild(el("span", "history-deltas", deltas.join(", ")));
    container.appendChild(row);
  });
}

function setPending(ui: Ui, pending: boolean): void {
  ui.state.pending = pending;
  const submit = document.getElementById("submit");
  if (submit instanceof HTMLButtonElement) {
    submit.disabled = pending;
  }
}

function applyOutcome(ui: Ui, outcome: SubmitOutcome): void {
  setPending(ui, false);
  ui.state.fieldErrors = {};
  ui.state.formErrors = [];
  if (outcome.kind === "result") {
    ui.state.lastResponse = outcome.response;
    const entry: HistoryEntry = {
      request: serializeRequest(ui.state),
      burnRate: outcome.response.burn_rate,
      riskBand: outcome.response.risk_band,
    };
    ui.history = pushHistory(ui.history, entry);
    renderResult(ui);
    renderHistory(ui);
  } else if (outcome.kind === "rejected") {
    ui.state.fieldErrors = outcome.fieldErrors;
    ui.state.formErrors = outcome.formErrors;
  } else {
    ui.state.formErrors = [`service unreachable: ${outcome.message}`];
  }
  renderFieldErrors(ui);
}

function renderApp(ui: Ui): void {
  const mount = root();
  mount.replaceChildren();
  const names = fieldNames(ui.info);
  const controller = new SubmitController(
    async (request) => {
      setPending(ui, true);
      return postPredict(SERVICE_ORIGIN, request, names);
    },
    (outcome) => {
      applyOutcome(ui, outcome);
    },
  );
  const notify = (): void => {
    controller.request(serializeRequest(ui.state));
  };

  const title = el("h1", undefined, "Burnout what-if explorer");
  const form = el("div", "form");
  for (const field of ui.info.fields) {
    form.appendChild(
      isEnumField(field)
        ? buildEnumControl(ui, field, notify)
        : buildSliderControl(ui, field, notify),
    );
  }
  const submit = el("button", undefined, "Score");
  submit.id = "submit";
  submit.addEventListener("click", () => {
    controller.submitNow(serializeRequest(ui.state));
  });
  const formErrors = el("div", "form-error");
  formErrors.id = "form-errors";

  const result = el("div", "result");
  const scoreLine = el("div", "score-line");
  const score = el("span", "score", "--");
  score.id = "score";
  const band = el("span", "band");
  band.id = "band";
  scoreLine.append(score, band);
  const gauge = el("div", "gauge");
  const fill = el("div", "gauge-fill");
  fill.id = "gauge-fill";
  gauge.appendChild(fill);
  for (const threshold of ui.info.band_thresholds) {
    const tick = el("div", "gauge-tick");
    tick.style.left = `${gaugePercent(threshold)}%`;
    gauge.appendChild(tick);
  }
  result.append(scoreLine, gauge);

  const historyTitle = el("h2", undefined, "Recent what-ifs");
  const history = el("div", "history-rows");
  history.id = "history";

  mount.append(title, form, submit, formErrors, result, historyTitle, history);
  controller.submitNow(serializeRequest(ui.state));
}

async function init(): Promise<void> {
  let info: ModelInfo;
  try {
    info = await fetchModelInfo(SERVICE_ORIGIN);
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    renderFatalError(message);
    return;
  }
  const ui: Ui = {
    info,
    state: buildFormFromModelInfo(info),
    history: [],
  };
  renderApp(ui);
}

void init();
