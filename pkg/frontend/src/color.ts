// Spin angle colormap: hue wheel with 0, 120 and 240 degrees mapped to
// green, blue and red, interpolating in between.

export type Rgb = [number, number, number];

function hslToRgb(h: number, s: number, l: number): Rgb {
  // h in degrees, s and l in [0, 1]
  const c = (1 - Math.abs(2 * l - 1)) * s;
  const hp = (((h % 360) + 360) % 360) / 60;
  const x = c * (1 - Math.abs((hp % 2) - 1));
  let rgb: [number, number, number];
  if (hp < 1) rgb = [c, x, 0];
  else if (hp < 2) rgb = [x, c, 0];
  else if (hp < 3) rgb = [0, c, x];
  else if (hp < 4) rgb = [0, x, c];
  else if (hp < 5) rgb = [x, 0, c];
  else rgb = [c, 0, x];
  const m = l - c / 2;
  return [
    Math.round((rgb[0] + m) * 255),
    Math.round((rgb[1] + m) * 255),
    Math.round((rgb[2] + m) * 255),
  ];
}

/** Color of a spin with the given angle in radians. */
export function angleColor(theta: number): Rgb {
  const degrees = (theta * 180) / Math.PI;
  // angle 0 -> green (hue 120), 120 -> blue (hue 240), 240 -> red (hue 360)
  return hslToRgb(120 + degrees, 1.0, 0.5);
}

export function rgbHex([r, g, b]: Rgb): string {
  const part = (v: number) => v.toString(16).padStart(2, "0");
  return `#${part(r)}${part(g)}${part(b)}`;
}

/** Highlight palette for the longest loops, longest first. */
export const LOOP_PALETTE = ["red", "blue", "green", "purple", "orange"];

export const LOOP_DEFAULT_COLOR = "#444444";
