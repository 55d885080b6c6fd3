/**
 * Session view renderer: pure functions from state to HTML.
 *
 * The renderer only ever draws what the latest service response contained:
 * the prediction preview verbatim, and one card per offered option. The
 * finalize control is rendered unconditionally, with the same visual weight
 * as the option cards, so opting out is always available and never nagged.
 */

import {
  describeAdded,
  escapeHtml,
  formatGainBadge,
  formatScore,
  formatValidationNote,
  nodeLabel,
} from "./format.js";
import type { SessionState } from "./state.js";
import type { CertificateLink, OptionOffer } from "./types.js";

function renderPrediction(state: SessionState, attributeNames?: string[]): string {
  const p = state.prediction;
  return `
  <section class="prediction-panel" data-label="${p.label}" data-model="${escapeHtml(p.model_id)}">
    <h2>Current prediction</h2>
    <p class="prediction-label">label <strong>${p.label}</strong></p>
    <p class="prediction-score">score ${formatScore(p.score)}</p>
    <p class="prediction-node">serving group: ${escapeHtml(nodeLabel(p.node, attributeNames))}</p>
    <p class="prediction-model">model: ${escapeHtml(p.model_id)}</p>
  </section>`;
}

function renderBreadcrumb(state: SessionState): string {
  const crumbs =
    state.reported.length === 0
      ? `<span class="crumb crumb-empty">nothing reported yet</span>`
      : state.reported
          .map(
            (pair) =>
              `<span class="crumb">${escapeHtml(pair.attribute)} = ${escapeHtml(pair.level)}</span>`,
          )
          .join(`<span class="crumb-sep">&rsaquo;</span>`);
  return `<nav class="breadcrumb" aria-label="reported attributes">${crumbs}</nav>`;
}

function renderOptionCard(option: OptionOffer, index: number): string {
  const badge =
    option.gain === null
      ? ""
      : `<span class="gain-badge">${formatGainBadge(option.gain.gain)}</span>
         <span class="validation-note">${escapeHtml(formatValidationNote(option.gain.n_validation))}</span>`;
  return `
    <li class="option-card" data-option-index="${index}" data-node="${escapeHtml(nodeLabel(option.node))}">
      <p class="option-title">report ${escapeHtml(describeAdded(option.added))}</p>
      ${badge}
      <button type="button" class="option-report" data-action="choose-option" data-option-index="${index}">
        Report this
      </button>
    </li>`;
}

function renderOptions(state: SessionState): string {
  if (state.finalized) {
    return "";
  }
  if (state.options.length === 0) {
    return `<p class="options-empty">No further reporting options are available.</p>`;
  }
  const cards = state.options.map((option, i) => renderOptionCard(option, i)).join("\n");
  return `
  <section class="options-section">
    <h2>Optional disclosures</h2>
    <p class="options-note">Reporting is optional. Each card shows the estimated change in
    performance for people in that group, measured on held-out validation data.</p>
    <ul class="options">${cards}</ul>
  </section>`;
}

function renderFinalizeControl(state: SessionState): string {
  const disabled = state.finalized ? " disabled" : "";
  return `
  <section class="finalize-section">
    <button type="button" class="finalize-button" data-action="finalize"${disabled}>
      Get my prediction now
    </button>
    <p class="finalize-note">You can stop here at any time. Anything you have not reported
    stays undisclosed, and the prediction uses only what you chose to share.</p>
  </section>`;
}

function renderChainLink(link: CertificateLink, attributeNames?: string[]): string {
  const gain =
    link.gain === null
      ? `<span class="chain-baseline">baseline</span>`
      : `<span class="gain-badge">${formatGainBadge(link.gain.gain)}</span>
         <span class="validation-note">${escapeHtml(formatValidationNote(link.gain.n_validation))}</span>`;
  return `
      <li class="chain-link">
        <span class="chain-node">${escapeHtml(nodeLabel(link.node, attributeNames))}</span>
        <span class="chain-model">${escapeHtml(link.model_id)}</span>
        ${gain}
      </li>`;
}

function renderOutcome(state: SessionState, attributeNames?: string[]): string {
  if (state.outcome === null) {
    return "";
  }
  const chain = state.outcome.certificate_chain
    .map((link) => renderChainLink(link, attributeNames))
    .join("\n");
  return `
  <section class="outcome">
    <h2>Final prediction</h2>
    <p class="outcome-provenance">served by <strong>${escapeHtml(state.outcome.model_id)}</strong>
    for group ${escapeHtml(nodeLabel(state.outcome.serving_node, attributeNames))}</p>
    <ol class="certificate-chain">${chain}</ol>
  </section>`;
}

function renderInlineError(state: SessionState): string {
  if (state.error === null) {
    return "";
  }
  return `<p class="inline-error" role="alert">${escapeHtml(state.error)}</p>`;
}

/**
 * Render the whole session view. `attributeNames` (from the public system
 * document) makes node labels read "sex=female" instead of bare levels.
 */
export function renderSession(state: SessionState, attributeNames?: string[]): string {
  return `
<div class="session" data-session-id="${escapeHtml(state.sessionId)}" data-finalized="${state.finalized}">
  ${renderInlineError(state)}
  ${renderPrediction(state, attributeNames)}
  ${renderBreadcrumb(state)}
  ${renderOptions(state)}
  ${renderFinalizeControl(state)}
  ${renderOutcome(state, attributeNames)}
</div>`;
}

/** Full-width banner for failures that leave nothing else to draw. */
export function renderErrorBanner(message: string): string {
  return `<div class="banner banner-error" role="alert">${escapeHtml(message)}</div>`;
}
