/** Least-squares helpers for decay/growth exponent annotations. */

/**
 * Log-log slope fitted on the trailing decade of the abscissa (early samples
 * carry transients, so they are excluded by design).
 */
export function lastDecadeSlope(x: number[], y: number[]): number | null {
  const pairs: Array<[number, number]> = [];
  const xMax = Math.max(...x);
  for (let i = 0; i < x.length; i++) {
    if (x[i] >= xMax / 10 && x[i] > 0 && Math.abs(y[i]) > 0) {
      pairs.push([Math.log(x[i]), Math.log(Math.abs(y[i]))]);
    }
  }
  if (pairs.length < 4) {
    return null;
  }
  return leastSquaresSlope(pairs);
}

export function leastSquaresSlope(pairs: Array<[number, number]>): number {
  const n = pairs.length;
  let sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const [a, b] of pairs) {
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  const denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}
