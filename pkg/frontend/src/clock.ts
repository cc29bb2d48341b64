/** Clock-hand geometry for the nomon view. */

/**
 * Angle of a clock hand in radians, clockwise from noon (straight up).
 *
 * A clock with the given phase crosses noon at engine times t where
 * t = phase (mod period), so the angle is 2*pi*(((t - phase) mod T) / T).
 */
export function handAngle(engineTimeMs: number, phaseMs: number, periodMs: number): number {
  if (periodMs <= 0) throw new Error("period must be positive");
  const delta = engineTimeMs - phaseMs;
  const frac = ((delta % periodMs) + periodMs) % periodMs / periodMs;
  return 2 * Math.PI * frac;
}

/** Tip of the hand in canvas coordinates (y grows downward, noon is up). */
export function handTip(
  cx: number, cy: number, radius: number, angle: number,
): { x: number; y: number } {
  return { x: cx + radius * Math.sin(angle), y: cy - radius * Math.cos(angle) };
}

/** Milliseconds until this clock next crosses noon. */
export function msToNoon(engineTimeMs: number, phaseMs: number, periodMs: number): number {
  const a = handAngle(engineTimeMs, phaseMs, periodMs);
  return Math.round(((2 * Math.PI - a) % (2 * Math.PI)) / (2 * Math.PI) * periodMs);
}
