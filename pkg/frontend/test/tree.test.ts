import { beforeEach, describe, expect, it } from "vitest";

import { formatGainBadge } from "../src/format.js";
import { renderTreeFailure, renderTreeOverview } from "../src/tree.js";
import { clinicSystemView, rootOnlySystemView, sequentialSystemView } from "./fixtures.js";

/** Direct child of `el` with the given class (ignores nested subtrees). */
function directChild(el: Element, className: string): Element | null {
  return [...el.children].find((child) => child.classList.contains(className)) ?? null;
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("renderTreeOverview", () => {
  it("draws every node: four leaves under the root, two of them greyed", () => {
    document.body.innerHTML = renderTreeOverview(clinicSystemView);

    const nodes = document.querySelectorAll(".tree-node");
    expect(nodes).toHaveLength(5);
    const pruned = document.querySelectorAll(".tree-node.pruned");
    expect(pruned).toHaveLength(2);
    const prunedLabels = [...pruned].map((el) => el.getAttribute("data-node")).sort();
    expect(prunedLabels).toEqual(["sex=female, age_group=old", "sex=male, age_group=young"]);
    for (const stub of pruned) {
      expect(directChild(stub, "pruned-tag")).not.toBeNull();
      expect(directChild(stub, "gain-badge")).toBeNull();
    }
  });

  it("annotates every surviving node with its gain from the public document", () => {
    document.body.innerHTML = renderTreeOverview(clinicSystemView);

    const surviving = [...document.querySelectorAll(".tree-node.surviving")];
    expect(surviving).toHaveLength(3);

    const root = document.querySelector('.tree-node[data-node="anyone (nothing reported)"]')!;
    expect(directChild(root, "node-baseline")).not.toBeNull();

    const rendered = new Map(
      surviving
        .filter((node) => node !== root)
        .map((node) => [
          node.getAttribute("data-node"),
          directChild(node, "gain-badge")!.textContent,
        ]),
    );
    const expected = new Map(
      clinicSystemView.tree.nodes
        .filter((node) => node.surviving && node.certificate !== null)
        .map((node) => {
          const label = node.entries
            .map((level, i) => {
              const attribute = clinicSystemView.schema.attributes[i]!;
              return level === null ? null : `${attribute.name}=${attribute.levels[level]}`;
            })
            .filter((part): part is string => part !== null)
            .join(", ");
          return [label, formatGainBadge(node.certificate!.gain)];
        }),
    );
    expect(rendered).toEqual(expected);
    expect(rendered.get("sex=female, age_group=young")).toBe("+100.0%");
    expect(rendered.get("sex=male, age_group=old")).toBe("+100.0%");
  });

  it("renders a lone root for a system with no reporting options", () => {
    document.body.innerHTML = renderTreeOverview(rootOnlySystemView);

    expect(document.querySelectorAll(".tree-node")).toHaveLength(1);
    expect(document.querySelectorAll(".tree-node.pruned")).toHaveLength(0);
    expect(document.querySelector(".gain-badge")).toBeNull();
  });

  it("nests a stepwise tree two levels deep", () => {
    document.body.innerHTML = renderTreeOverview(sequentialSystemView);

    const nested = document.querySelector(
      ".tree-node .tree-children .tree-node .tree-children .tree-node",
    );
    expect(nested).not.toBeNull();
    expect(nested!.getAttribute("data-node")).toBe("sex=female, age_group=young");

    const intermediate = document.querySelector('.tree-node[data-node="sex=female"]')!;
    expect(directChild(intermediate, "gain-badge")!.textContent).toBe("+24.5%");
  });

  it("names attributes from the public schema", () => {
    document.body.innerHTML = renderTreeOverview(clinicSystemView);

    expect(
      document.querySelector('.tree-node[data-node="sex=female, age_group=young"]'),
    ).not.toBeNull();
    expect(document.body.textContent).toContain("sex=male, age_group=old");
  });
});

describe("renderTreeFailure", () => {
  it("renders a fetch-failure banner", () => {
    document.body.innerHTML = renderTreeFailure("service unreachable: connect ECONNREFUSED");

    const banner = document.querySelector(".tree-failure")!;
    expect(banner.getAttribute("role")).toBe("alert");
    expect(banner.textContent).toContain("could not load the system overview");
    expect(banner.textContent).toContain("ECONNREFUSED");
  });
});
