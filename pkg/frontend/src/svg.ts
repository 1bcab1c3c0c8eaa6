export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Pixel coordinate with stable two-decimal rounding. */
export function px(v: number): string {
  const r = Math.round(v * 100) / 100;
  // avoid "-0" flipping between runs of equal input (it cannot, but keep output canonical)
  return String(r === 0 ? 0 : r);
}

export function tag(
  name: string,
  attrs: Record<string, string | number>,
  children?: string[],
): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? px(v) : esc(v)}"`)
    .join(" ");
  const open = parts ? `<${name} ${parts}` : `<${name}`;
  if (children === undefined) return `${open}/>`;
  return `${open}>${children.join("")}</${name}>`;
}

export function textEl(
  attrs: Record<string, string | number>,
  content: string,
): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? px(v) : esc(v)}"`)
    .join(" ");
  return `<text ${parts}>${esc(content)}</text>`;
}
