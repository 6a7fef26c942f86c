// Orbit camera rig and the pointer-as-gaze model, kept free of DOM and
// three.js so the math is testable. Conventions match the engine: +Y up,
// right-handed, a pose looks along its rotated -Z, quaternions are (w,x,y,z).

export type Vec3 = [number, number, number];
export type Quat = [number, number, number, number]; // (w, x, y, z)

export function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

export function add(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

export function scale(a: Vec3, s: number): Vec3 {
  return [a[0] * s, a[1] * s, a[2] * s];
}

export function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

export function norm(a: Vec3): number {
  return Math.hypot(a[0], a[1], a[2]);
}

export function normalize(a: Vec3): Vec3 {
  const n = norm(a);
  if (n === 0) throw new Error('cannot normalize zero vector');
  return [a[0] / n, a[1] / n, a[2] / n];
}

/** Quaternion whose rotated -Z axis points along `forward` (world +Y up). */
export function lookAtQuat(forward: Vec3, upHint: Vec3 = [0, 1, 0]): Quat {
  const f = normalize(forward);
  const z: Vec3 = [-f[0], -f[1], -f[2]];
  let x = cross(upHint, z);
  if (norm(x) < 1e-12) {
    x = cross([1, 0, 0], z);
  }
  x = normalize(x);
  const y = cross(z, x);
  // Shepperd's method on the column matrix [x y z]
  const m00 = x[0], m01 = y[0], m02 = z[0];
  const m10 = x[1], m11 = y[1], m12 = z[1];
  const m20 = x[2], m21 = y[2], m22 = z[2];
  const tr = m00 + m11 + m22;
  let q: Quat;
  if (tr > 0) {
    const s = Math.sqrt(tr + 1) * 2;
    q = [0.25 * s, (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s];
  } else if (m00 > m11 && m00 > m22) {
    const s = Math.sqrt(1 + m00 - m11 - m22) * 2;
    q = [(m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s];
  } else if (m11 > m22) {
    const s = Math.sqrt(1 + m11 - m00 - m22) * 2;
    q = [(m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s];
  } else {
    const s = Math.sqrt(1 + m22 - m00 - m11) * 2;
    q = [(m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s];
  }
  const n = Math.hypot(q[0], q[1], q[2], q[3]);
  return [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
}

/** Apply a (w,x,y,z) quaternion to a vector. */
export function rotate(q: Quat, v: Vec3): Vec3 {
  const [w, ux, uy, uz] = q;
  const t: Vec3 = [
    2 * (uy * v[2] - uz * v[1]),
    2 * (uz * v[0] - ux * v[2]),
    2 * (ux * v[1] - uy * v[0]),
  ];
  return [
    v[0] + w * t[0] + uy * t[2] - uz * t[1],
    v[1] + w * t[1] + uz * t[0] - ux * t[2],
    v[2] + w * t[2] + ux * t[1] - uy * t[0],
  ];
}

export interface OrbitState {
  target: Vec3; // what the camera circles
  azimuth: number; // radians around +Y, 0 looks from +Z
  elevation: number; // radians above the horizon
  distance: number;
}

export const ORBIT_LIMITS = {
  minDistance: 1.2,
  maxDistance: 8.0,
  minElevation: -0.4,
  maxElevation: 1.35,
};

export function defaultOrbit(target: Vec3 = [0, 1.8, 0]): OrbitState {
  return { target, azimuth: 0, elevation: 0.1, distance: 4.0 };
}

export function orbitEye(o: OrbitState): Vec3 {
  const r = o.distance * Math.cos(o.elevation);
  return [
    o.target[0] + r * Math.sin(o.azimuth),
    o.target[1] + o.distance * Math.sin(o.elevation),
    o.target[2] + r * Math.cos(o.azimuth),
  ];
}

export function orbitMove(
  o: OrbitState,
  dAzimuth: number,
  dElevation: number,
  dDistance: number,
): OrbitState {
  const clamp = (v: number, lo: number, hi: number) => Math.min(hi, Math.max(lo, v));
  return {
    target: o.target,
    azimuth: (o.azimuth + dAzimuth) % (2 * Math.PI),
    elevation: clamp(o.elevation + dElevation, ORBIT_LIMITS.minElevation, ORBIT_LIMITS.maxElevation),
    distance: clamp(o.distance + dDistance, ORBIT_LIMITS.minDistance, ORBIT_LIMITS.maxDistance),
  };
}

/**
 * Pointer-as-gaze: the gaze ray leaves the camera position along the view
 * direction, nudged by the pointer's offset from the screen centre (head
 * gaze approximated by where the visitor points). `px`, `py` are in
 * [-1, 1] (normalized device coordinates), `fovScale` radians at the edge.
 */
export function gazeQuat(o: OrbitState, px: number, py: number, fovScale = 0.35): Quat {
  const eye = orbitEye(o);
  const centre = normalize(sub(o.target, eye));
  const up: Vec3 = [0, 1, 0];
  let right = cross(centre, up);
  if (norm(right) < 1e-9) right = [1, 0, 0];
  right = normalize(right);
  const trueUp = cross(right, centre);
  const dir = normalize(
    add(add(centre, scale(right, px * fovScale)), scale(trueUp, py * fovScale)),
  );
  return lookAtQuat(dir);
}

/** Strictly increasing session clock for gaze timestamps. */
export class GazeClock {
  private last = -1;

  constructor(private readonly origin: number) {}

  sample(nowMs: number): number {
    let t = (nowMs - this.origin) / 1000;
    if (t <= this.last) t = this.last + 1e-6;
    this.last = t;
    return t;
  }
}
