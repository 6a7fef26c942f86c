import { describe, expect, it } from 'vitest';

import {
  GazeClock,
  ORBIT_LIMITS,
  defaultOrbit,
  gazeQuat,
  lookAtQuat,
  normalize,
  orbitEye,
  orbitMove,
  rotate,
  sub,
} from '../src/gazecam';

const close = (a: number[], b: number[], tol = 1e-9) =>
  a.every((v, i) => Math.abs(v - b[i]) < tol);

describe('lookAtQuat', () => {
  it('identity looks along -Z', () => {
    const q = lookAtQuat([0, 0, -1]);
    expect(close([...q], [1, 0, 0, 0])).toBe(true);
  });

  it('rotated -Z equals the requested forward', () => {
    const targets: [number, number, number][] = [
      [1, 0, 0], [0, 0, 1], [-1, 0, 0], [0.3, 0.4, -0.5], [0, 1, 0.001],
    ];
    for (const f of targets) {
      const dir = normalize(f);
      const q = lookAtQuat(dir);
      expect(close(rotate(q, [0, 0, -1]) as unknown as number[], dir as unknown as number[], 1e-9)).toBe(true);
      expect(Math.hypot(...q)).toBeCloseTo(1, 12);
    }
  });
});

describe('orbit rig', () => {
  it('eye circles the target at the configured distance', () => {
    const o = defaultOrbit([0, 1.8, 0]);
    const eye = orbitEye(o);
    expect(Math.hypot(...sub(eye, o.target))).toBeCloseTo(o.distance, 10);
  });

  it('clamps elevation and distance', () => {
    let o = defaultOrbit();
    o = orbitMove(o, 0, 99, 99);
    expect(o.elevation).toBe(ORBIT_LIMITS.maxElevation);
    expect(o.distance).toBe(ORBIT_LIMITS.maxDistance);
    o = orbitMove(o, 0, -99, -99);
    expect(o.elevation).toBe(ORBIT_LIMITS.minElevation);
    expect(o.distance).toBe(ORBIT_LIMITS.minDistance);
  });
});

describe('pointer-as-gaze', () => {
  it('centre pointer looks straight at the target', () => {
    const o = defaultOrbit([0, 1.8, 0]);
    const q = gazeQuat(o, 0, 0);
    const eye = orbitEye(o);
    const want = normalize(sub(o.target, eye));
    expect(close(rotate(q, [0, 0, -1]) as unknown as number[], want as unknown as number[], 1e-9)).toBe(true);
  });

  it('pointer offset nudges the ray in the expected direction', () => {
    const o = defaultOrbit([0, 1.8, 0]); // azimuth 0: camera at +Z looking -Z
    const right = rotate(gazeQuat(o, 1, 0), [0, 0, -1]);
    const left = rotate(gazeQuat(o, -1, 0), [0, 0, -1]);
    const up = rotate(gazeQuat(o, 0, 1), [0, 0, -1]);
    expect(right[0]).toBeGreaterThan(left[0]); // screen-right is +X when facing -Z
    expect(up[1]).toBeGreaterThan(rotate(gazeQuat(o, 0, -1), [0, 0, -1])[1]);
  });
});

describe('GazeClock', () => {
  it('produces strictly increasing timestamps even for equal inputs', () => {
    const clock = new GazeClock(1000);
    const a = clock.sample(1016.6);
    const b = clock.sample(1016.6);
    const c = clock.sample(1015.0); // clock going backwards still moves on
    expect(b).toBeGreaterThan(a);
    expect(c).toBeGreaterThan(b);
  });
});
