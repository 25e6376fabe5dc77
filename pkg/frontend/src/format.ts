/** Display formatting: masses shown to 5 decimal places throughout the UI. */

export function formatMass(value: number): string {
  return value.toFixed(5);
}

export function formatPercent(value: number): string {
  return `${(value * 100).toFixed(1)}%`;
}

/** Sum of displayed masses; rendered in the panel footer as a sanity line. */
export function displayedSum(masses: number[]): string {
  return formatMass(masses.reduce((a, b) => a + b, 0));
}

export function focalDisplay(focal: string[], frameSize: number): string {
  if (focal.length === frameSize) return "Θ (any hypothesis)";
  return focal.join(", ");
}
