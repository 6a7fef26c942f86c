// Parser for the engine's OBJ subset: `v x y z`, `f a b c` (1-based), `#`.

export interface ParsedMesh {
  positions: Float32Array; // xyz per vertex
  triangles: Uint32Array; // three vertex indices per triangle
}

export function parseObjSubset(text: string): ParsedMesh {
  const positions: number[] = [];
  const triangles: number[] = [];
  const lines = text.split('\n');
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (line === '' || line.startsWith('#')) continue;
    const parts = line.split(/\s+/);
    if (parts[0] === 'v') {
      if (parts.length !== 4) throw new Error(`line ${i + 1}: vertex needs 3 coordinates`);
      const [x, y, z] = parts.slice(1).map(Number);
      if ([x, y, z].some((v) => !Number.isFinite(v))) {
        throw new Error(`line ${i + 1}: non-numeric vertex`);
      }
      positions.push(x, y, z);
    } else if (parts[0] === 'f') {
      if (parts.length !== 4) throw new Error(`line ${i + 1}: face needs 3 indices`);
      for (const p of parts.slice(1)) {
        if (!/^\d+$/.test(p)) throw new Error(`line ${i + 1}: bad face index ${p}`);
        triangles.push(Number(p) - 1);
      }
    } else {
      throw new Error(`line ${i + 1}: unsupported keyword ${parts[0]}`);
    }
  }
  const vertexCount = positions.length / 3;
  for (const idx of triangles) {
    if (idx < 0 || idx >= vertexCount) throw new Error(`face index ${idx + 1} out of range`);
  }
  return {
    positions: new Float32Array(positions),
    triangles: new Uint32Array(triangles),
  };
}

export function triangleCentroid(mesh: ParsedMesh, tri: number): [number, number, number] {
  const [a, b, c] = [mesh.triangles[tri * 3], mesh.triangles[tri * 3 + 1], mesh.triangles[tri * 3 + 2]];
  return [
    (mesh.positions[a * 3] + mesh.positions[b * 3] + mesh.positions[c * 3]) / 3,
    (mesh.positions[a * 3 + 1] + mesh.positions[b * 3 + 1] + mesh.positions[c * 3 + 1]) / 3,
    (mesh.positions[a * 3 + 2] + mesh.positions[b * 3 + 2] + mesh.positions[c * 3 + 2]) / 3,
  ];
}
