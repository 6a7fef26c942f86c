// Three.js rendering: the statue (physical + virtual tint), the sliding
// puck, particle cues, the timeline strip, and the reconstruction backdrop.
// Everything rendered is read from the ViewState each frame.

import * as THREE from 'three';

import { OrbitState, orbitEye } from './gazecam';
import { ParsedMesh, triangleCentroid } from './objparse';
import { ScenarioSummary } from './protocol';
import { ViewState } from './viewstate';

const HOVER_SPRITES = 60;
const HIGHLIGHT_SPRITES = 240;

function buildGeometry(mesh: ParsedMesh, triangles: number[]): THREE.BufferGeometry {
  const positions = new Float32Array(triangles.length * 9);
  let o = 0;
  for (const tri of triangles) {
    for (let k = 0; k < 3; k++) {
      const v = mesh.triangles[tri * 3 + k];
      positions[o++] = mesh.positions[v * 3];
      positions[o++] = mesh.positions[v * 3 + 1];
      positions[o++] = mesh.positions[v * 3 + 2];
    }
  }
  const geometry = new THREE.BufferGeometry();
  geometry.setAttribute('position', new THREE.BufferAttribute(positions, 3));
  geometry.computeVertexNormals();
  return geometry;
}

function labelSprite(text: string): THREE.Sprite {
  const canvas = document.createElement('canvas');
  canvas.width = 512;
  canvas.height = 64;
  const ctx = canvas.getContext('2d')!;
  ctx.fillStyle = 'rgba(10, 14, 20, 0.75)';
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = '#e8e2d0';
  ctx.font = '42px Georgia, serif';
  ctx.textBaseline = 'middle';
  ctx.fillText(text, 16, 32);
  const sprite = new THREE.Sprite(
    new THREE.SpriteMaterial({ map: new THREE.CanvasTexture(canvas), transparent: true }),
  );
  sprite.scale.set(2.4, 0.3, 1);
  return sprite;
}

export class Stage {
  readonly renderer: THREE.WebGLRenderer;
  readonly scene = new THREE.Scene();
  readonly camera: THREE.PerspectiveCamera;

  private puck: THREE.Mesh;
  private hoverPoints: THREE.Points;
  private highlightPoints: THREE.Points;
  private hoverPositions = new Float32Array(HOVER_SPRITES * 3);
  private highlightPositions = new Float32Array(HIGHLIGHT_SPRITES * 3);
  private timelineGroup = new THREE.Group();
  private backdropGroup = new THREE.Group();
  private floor: THREE.Mesh;
  private centroidsByRoi = new Map<number, [number, number, number][]>();
  private shimmer = 0;

  constructor(canvas: HTMLCanvasElement) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.renderer.setPixelRatio(window.devicePixelRatio);
    this.scene.background = new THREE.Color(0x10141c);
    this.scene.fog = new THREE.Fog(0x10141c, 8, 22);

    this.camera = new THREE.PerspectiveCamera(55, 1, 0.05, 60);

    const ambient = new THREE.HemisphereLight(0xcfd8ff, 0x202018, 0.9);
    const key = new THREE.DirectionalLight(0xfff2dd, 1.6);
    key.position.set(4, 7, 5);
    const rim = new THREE.DirectionalLight(0x88aaff, 0.5);
    rim.position.set(-5, 3, -4);
    this.scene.add(ambient, key, rim);

    this.floor = new THREE.Mesh(
      new THREE.CircleGeometry(9, 48),
      new THREE.MeshStandardMaterial({ color: 0x23282f, roughness: 0.95 }),
    );
    this.floor.rotation.x = -Math.PI / 2;
    this.scene.add(this.floor);

    this.puck = new THREE.Mesh(
      new THREE.CylinderGeometry(0.05, 0.05, 0.012, 24),
      new THREE.MeshStandardMaterial({
        color: 0x7fd4ff, emissive: 0x2a6f9e, transparent: true, opacity: 0.95,
      }),
    );
    this.puck.visible = false;
    this.scene.add(this.puck);

    this.hoverPoints = new THREE.Points(
      new THREE.BufferGeometry(),
      new THREE.PointsMaterial({
        color: 0xaee7ff, size: 0.03, transparent: true, opacity: 0.9, depthWrite: false,
      }),
    );
    this.hoverPoints.geometry.setAttribute(
      'position', new THREE.BufferAttribute(this.hoverPositions, 3),
    );
    this.hoverPoints.visible = false;
    this.scene.add(this.hoverPoints);

    this.highlightPoints = new THREE.Points(
      new THREE.BufferGeometry(),
      new THREE.PointsMaterial({
        color: 0xffe9a8, size: 0.035, transparent: true, opacity: 0.85, depthWrite: false,
      }),
    );
    this.highlightPoints.geometry.setAttribute(
      'position', new THREE.BufferAttribute(this.highlightPositions, 3),
    );
    this.highlightPoints.visible = false;
    this.scene.add(this.highlightPoints);

    this.scene.add(this.timelineGroup, this.backdropGroup);
    this.timelineGroup.visible = false;
    this.backdropGroup.visible = false;
  }

  setStatue(mesh: ParsedMesh, scenario: ScenarioSummary): void {
    const virtual = new Set(scenario.virtual_triangles);
    const physical: number[] = [];
    const reconstructed: number[] = [];
    const total = mesh.triangles.length / 3;
    for (let tri = 0; tri < total; tri++) {
      (virtual.has(tri) ? reconstructed : physical).push(tri);
    }
    const marble = new THREE.Mesh(
      buildGeometry(mesh, physical),
      new THREE.MeshStandardMaterial({ color: 0xded9ce, roughness: 0.65 }),
    );
    const ghost = new THREE.Mesh(
      buildGeometry(mesh, reconstructed),
      new THREE.MeshStandardMaterial({
        color: 0x9fd4e8, roughness: 0.4, transparent: true, opacity: 0.75,
        emissive: 0x11333f,
      }),
    );
    this.scene.add(marble, ghost);

    this.centroidsByRoi.clear();
    for (const roi of scenario.rois) {
      this.centroidsByRoi.set(
        roi.roi_id,
        roi.highlight_triangles.map((tri) => triangleCentroid(mesh, tri)),
      );
    }
    this.buildTimeline(scenario);
    this.buildBackdrop();
  }

  private buildTimeline(scenario: ScenarioSummary): void {
    this.timelineGroup.clear();
    if (!scenario.timeline) return;
    // three labelled rows rolled out behind the statue
    scenario.timeline.rows.forEach((row, i) => {
      const y = 2.9 - i * 0.85;
      const label = labelSprite(row.name);
      label.position.set(-2.6, y + 0.35, -2.2);
      this.timelineGroup.add(label);
      row.entries.forEach((entry, j) => {
        const card = new THREE.Mesh(
          new THREE.PlaneGeometry(0.55, 0.62),
          new THREE.MeshStandardMaterial({ color: 0x384252, roughness: 0.8 }),
        );
        card.position.set(-1.9 + j * 1.25, y, -2.2);
        this.timelineGroup.add(card);
        const year = labelSprite(String(entry.year));
        year.scale.set(0.9, 0.14, 1);
        year.position.set(-1.9 + j * 1.25, y - 0.45, -2.15);
        this.timelineGroup.add(year);
      });
    });
  }

  private buildBackdrop(): void {
    this.backdropGroup.clear();
    // reconstructed hall: a wall niche behind, the floor dropped away
    const wall = new THREE.Mesh(
      new THREE.PlaneGeometry(10, 7),
      new THREE.MeshStandardMaterial({ color: 0x4a4238, roughness: 0.9 }),
    );
    wall.position.set(0, 3.0, -3.4);
    const niche = new THREE.Mesh(
      new THREE.RingGeometry(1.3, 2.6, 32, 1, 0, Math.PI),
      new THREE.MeshStandardMaterial({ color: 0x5c5344, side: THREE.DoubleSide }),
    );
    niche.position.set(0, 2.2, -3.35);
    const pedestal = new THREE.Mesh(
      new THREE.BoxGeometry(2.2, 1.2, 2.2),
      new THREE.MeshStandardMaterial({ color: 0x3c362e }),
    );
    pedestal.position.set(0, -0.6, 0);
    this.backdropGroup.add(wall, niche, pedestal);
  }

  resize(width: number, height: number): void {
    this.renderer.setSize(width, height, false);
    this.camera.aspect = width / height;
    this.camera.updateProjectionMatrix();
  }

  /** Project a world point to normalized device coordinates. */
  project(point: [number, number, number]): { x: number; y: number; behind: boolean } {
    const v = new THREE.Vector3(...point).project(this.camera);
    return { x: v.x, y: v.y, behind: v.z > 1 };
  }

  render(state: ViewState, orbit: OrbitState): void {
    const eye = orbitEye(orbit);
    this.camera.position.set(eye[0], eye[1], eye[2]);
    this.camera.lookAt(new THREE.Vector3(...orbit.target));
    this.shimmer += 1;

    if (state.puck) {
      this.puck.visible = true;
      this.puck.position.set(...state.puck.point);
      const normal = new THREE.Vector3(...state.puck.normal);
      this.puck.quaternion.setFromUnitVectors(new THREE.Vector3(0, 1, 0), normal);
      this.puck.position.addScaledVector(normal, 0.012);
    } else {
      this.puck.visible = false;
    }

    // puck-local sprinkle while the gaze rests inside a collider
    const hovering = state.hoveringRoi !== null && state.puck !== null;
    this.hoverPoints.visible = hovering;
    if (hovering && state.puck) {
      for (let i = 0; i < HOVER_SPRITES; i++) {
        const a = (i / HOVER_SPRITES) * Math.PI * 2 + this.shimmer * 0.05;
        const r = 0.05 + 0.06 * ((i * 2654435761 % 97) / 97) * (1 + Math.sin(this.shimmer * 0.1 + i));
        this.hoverPositions[i * 3] = state.puck.point[0] + Math.cos(a) * r;
        this.hoverPositions[i * 3 + 1] = state.puck.point[1] + ((i % 7) / 7 - 0.35) * 0.1 + 0.02 * Math.sin(this.shimmer * 0.08 + i);
        this.hoverPositions[i * 3 + 2] = state.puck.point[2] + Math.sin(a) * r;
      }
      this.hoverPoints.geometry.attributes.position.needsUpdate = true;
    }

    // whole-region particles while a roi is highlighted or cued
    const centroids = state.highlightedRoi !== null
      ? this.centroidsByRoi.get(state.highlightedRoi) ?? []
      : [];
    this.highlightPoints.visible = centroids.length > 0;
    if (centroids.length > 0) {
      for (let i = 0; i < HIGHLIGHT_SPRITES; i++) {
        const c = centroids[i % centroids.length];
        const jitter = 0.035 * Math.sin(this.shimmer * 0.11 + i * 1.7);
        this.highlightPositions[i * 3] = c[0] + jitter;
        this.highlightPositions[i * 3 + 1] = c[1] + 0.035 * Math.cos(this.shimmer * 0.09 + i);
        this.highlightPositions[i * 3 + 2] = c[2] + 0.035 * Math.sin(this.shimmer * 0.07 + i * 0.9);
      }
      this.highlightPoints.geometry.attributes.position.needsUpdate = true;
    }

    const kind = state.playingUnit?.kind;
    this.timelineGroup.visible = kind === 'timeline';
    this.backdropGroup.visible = kind === 'reconstruction';
    this.floor.position.y = kind === 'reconstruction' ? -1.2 : 0;

    this.renderer.render(this.scene, this.camera);
  }
}
