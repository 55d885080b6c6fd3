/**
 * Browser bootstrap: wires the service client, session controller, and
 * renderers into the static page. All logic lives in the imported modules;
 * this file only reads inputs, dispatches clicks, and swaps innerHTML.
 */

import { ServiceClient } from "./api.js";
import { SessionController } from "./controller.js";
import { escapeHtml } from "./format.js";
import type { SessionState } from "./state.js";
import { renderTreeFailure, renderTreeOverview } from "./tree.js";
import { renderErrorBanner, renderSession } from "./view.js";

const DEFAULT_BASE_URL = "http://127.0.0.1:8000";
const BASE_URL_KEY = "partsys-service-base-url";

function initialBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("service");
  if (fromQuery) {
    return fromQuery;
  }
  return window.localStorage.getItem(BASE_URL_KEY) ?? DEFAULT_BASE_URL;
}

function parseFeatures(raw: string): number[] {
  const features: number[] = [];
  for (const piece of raw.split(",")) {
    const text = piece.trim();
    if (text === "") {
      continue;
    }
    const value = Number(text);
    if (!Number.isFinite(value)) {
      throw new Error(`features must be comma-separated numbers (got ${JSON.stringify(text)})`);
    }
    features.push(value);
  }
  if (features.length === 0) {
    throw new Error("enter at least one feature value");
  }
  return features;
}

function main(): void {
  const app = document.querySelector<HTMLElement>("#app");
  const treeHost = document.querySelector<HTMLElement>("#tree");
  const statusHost = document.querySelector<HTMLElement>("#status");
  const baseInput = document.querySelector<HTMLInputElement>("#base-url");
  const featuresInput = document.querySelector<HTMLInputElement>("#features");
  if (!app || !treeHost || !statusHost || !baseInput || !featuresInput) {
    return;
  }

  let attributeNames: string[] | undefined;
  const render = (state: SessionState | null): void => {
    app.innerHTML = state === null ? "" : renderSession(state, attributeNames);
  };

  baseInput.value = initialBaseUrl();
  let controller = new SessionController(new ServiceClient(baseInput.value), render);

  async function connect(): Promise<void> {
    const api = new ServiceClient(baseInput!.value.trim());
    window.localStorage.setItem(BASE_URL_KEY, api.baseUrl);
    controller = new SessionController(api, render);
    render(null);
    try {
      const view = await api.fetchSystem();
      attributeNames = view.schema.attributes.map((a) => a.name);
      treeHost!.innerHTML = renderTreeOverview(view);
      statusHost!.innerHTML = `<p class="status-ok">connected to
        <strong>${escapeHtml(view.name)}</strong>; features:
        ${escapeHtml(view.feature_names.join(", "))}</p>`;
      featuresInput!.placeholder = view.feature_names.map(() => "0.0").join(", ");
    } catch (exc) {
      const message = exc instanceof Error ? exc.message : String(exc);
      treeHost!.innerHTML = renderTreeFailure(message);
      statusHost!.innerHTML = "";
    }
  }

  async function startSession(): Promise<void> {
    try {
      const features = parseFeatures(featuresInput!.value);
      await controller.start(features);
    } catch (exc) {
      const message = exc instanceof Error ? exc.message : String(exc);
      app!.innerHTML = renderErrorBanner(message);
    }
  }

  document.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement | null)?.closest<HTMLElement>("[data-action]");
    if (!target) {
      return;
    }
    const action = target.dataset["action"];
    if (action === "connect") {
      void connect();
    } else if (action === "start-session") {
      void startSession();
    } else if (action === "choose-option") {
      void controller.chooseOption(Number(target.dataset["optionIndex"]));
    } else if (action === "finalize") {
      void controller.finalize();
    }
  });

  void connect();
}

main();
