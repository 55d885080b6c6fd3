/**
 * Formatting helpers: gain badges, validation notes, node labels.
 *
 * Gains arrive from the service in metric units (a 0.215 error reduction is
 * 21.5 percentage points); badges show them with an explicit sign and one
 * decimal place so the displayed value equals the served value to 0.1.
 */

/** "+21.5%" for 0.215, "-2.4%" for -0.024; never renders "-0.0%". */
export function formatGainBadge(gain: number): string {
  let points = Math.round(gain * 1000) / 10;
  if (Object.is(points, -0) || points === 0) {
    points = 0;
  }
  const sign = points >= 0 ? "+" : "-";
  return `${sign}${Math.abs(points).toFixed(1)}%`;
}

/** Uncertainty subtext shown under every gain badge. */
export function formatValidationNote(nValidation: number): string {
  return `based on n=${nValidation} validation cases`;
}

/** Scores are shown verbatim from the service preview, to three decimals. */
export function formatScore(score: number): string {
  return score.toFixed(3);
}

/**
 * Human-readable label for a session node given as level names,
 * e.g. ["female", null] -> "sex=female" (with attribute names supplied)
 * or "female" without them; the all-unreported root reads "nothing reported".
 */
export function nodeLabel(
  node: (string | null)[],
  attributeNames?: string[],
): string {
  const parts: string[] = [];
  node.forEach((level, i) => {
    if (level === null) {
      return;
    }
    const name = attributeNames?.[i];
    parts.push(name === undefined ? level : `${name}=${level}`);
  });
  return parts.length === 0 ? "nothing reported" : parts.join(", ");
}

/** Label for the disclosures an option adds: "sex=female + age_group=young". */
export function describeAdded(added: { attribute: string; level: string }[]): string {
  return added.map((p) => `${p.attribute}=${p.level}`).join(" + ");
}

/** Escape text for safe interpolation into HTML. */
export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}
