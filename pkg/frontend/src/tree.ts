/**
 * Static reporting-tree overview, rendered from the public system document.
 *
 * Every surviving node is drawn with its certified gain; pruned nodes remain
 * visible as greyed-out stubs so a reader can see which disclosures the
 * system declined to solicit, and why the surviving set looks the way it does.
 */

import { escapeHtml, formatGainBadge, formatValidationNote } from "./format.js";
import type { SystemView, TreeNodeView } from "./types.js";

function entriesKey(entries: (number | null)[] | null): string {
  return entries === null ? "<root>" : JSON.stringify(entries);
}

function treeNodeLabel(node: TreeNodeView, view: SystemView): string {
  const parts: string[] = [];
  node.entries.forEach((levelIndex, i) => {
    const attribute = view.schema.attributes[i];
    if (levelIndex === null || attribute === undefined) {
      return;
    }
    parts.push(`${attribute.name}=${attribute.levels[levelIndex] ?? `#${levelIndex}`}`);
  });
  return parts.length === 0 ? "anyone (nothing reported)" : parts.join(", ");
}

function renderTreeNode(
  node: TreeNodeView,
  childrenOf: Map<string, TreeNodeView[]>,
  view: SystemView,
): string {
  const label = treeNodeLabel(node, view);
  const gain =
    node.certificate === null
      ? `<span class="node-baseline">opt-out baseline</span>`
      : node.surviving
        ? `<span class="gain-badge">${formatGainBadge(node.certificate.gain)}</span>
           <span class="validation-note">${escapeHtml(formatValidationNote(node.certificate.n_validation))}</span>`
        : `<span class="pruned-tag">pruned</span>`;
  const children = childrenOf.get(entriesKey(node.entries)) ?? [];
  const childList =
    children.length === 0
      ? ""
      : `<ul class="tree-children">${children
          .map((child) => renderTreeNode(child, childrenOf, view))
          .join("\n")}</ul>`;
  const survivalClass = node.surviving ? "surviving" : "pruned";
  return `
    <li class="tree-node ${survivalClass}" data-node="${escapeHtml(label)}" data-surviving="${node.surviving}">
      <span class="node-label">${escapeHtml(label)}</span>
      <span class="node-model">${escapeHtml(node.model_id)}</span>
      ${gain}
      ${childList}
    </li>`;
}

/** Render the reporting tree with gains on survivors and greyed pruned stubs. */
export function renderTreeOverview(view: SystemView): string {
  const childrenOf = new Map<string, TreeNodeView[]>();
  let root: TreeNodeView | null = null;
  for (const node of view.tree.nodes) {
    if (node.parent === null) {
      root = node;
      continue;
    }
    const key = entriesKey(node.parent);
    const siblings = childrenOf.get(key) ?? [];
    siblings.push(node);
    childrenOf.set(key, siblings);
  }
  if (root === null) {
    return renderTreeFailure("the public system document has no root node");
  }
  return `
<section class="tree-overview">
  <h2>Reporting tree: ${escapeHtml(view.name)}</h2>
  <p class="tree-meta">kind ${escapeHtml(view.kind)} &middot; metric ${escapeHtml(view.metric)}
    &middot; pruning level ${view.alpha}</p>
  <ul class="tree">${renderTreeNode(root, childrenOf, view)}</ul>
</section>`;
}

/** Banner shown when the public system document cannot be fetched. */
export function renderTreeFailure(message: string): string {
  return `<div class="banner banner-error tree-failure" role="alert">
    could not load the system overview: ${escapeHtml(message)}</div>`;
}
