// Text encoders behind one async interface. "hash:<dim>" runs fully
// offline via the feature-hashing trick; any other model id goes to a
// configured HTTP endpoint that hosts the actual sentence encoder.

export type Encoder = (texts: string[]) => Promise<number[][]>;

export class ModelUnavailable extends Error {
  code = "model_unavailable";
}

export class EmptyPool extends Error {
  code = "empty_pool";
}

function fnv1a(text: string, seed: number): number {
  let h = (0x811c9dc5 ^ seed) >>> 0;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h;
}

function tokenize(text: string): string[] {
  const words = text.toLowerCase().split(/\s+/).filter((w) => w.length > 0);
  const tokens: string[] = [...words];
  for (let i = 0; i + 1 < words.length; i++) {
    tokens.push(words[i] + " " + words[i + 1]);
  }
  const flat = words.join(" ");
  for (let i = 0; i + 3 <= flat.length; i++) {
    tokens.push("#" + flat.slice(i, i + 3));
  }
  return tokens;
}

// Sparse random projection of token counts: bucket by hash, sign by a
// second hash bit, L2-normalize. Deterministic across platforms.
export function hashEncode(text: string, dim: number): number[] {
  const vector = new Array<number>(dim).fill(0);
  for (const token of tokenize(text)) {
    const bucket = fnv1a(token, 0) % dim;
    const sign = (fnv1a(token, 0x9e3779b9) & 1) === 0 ? 1 : -1;
    vector[bucket] += sign;
  }
  let norm = Math.sqrt(vector.reduce((acc, v) => acc + v * v, 0));
  if (norm === 0) {
    vector[0] = 1;
    norm = 1;
  }
  return vector.map((v) => v / norm);
}

function hashEncoder(dim: number): Encoder {
  return async (texts) => texts.map((t) => hashEncode(t, dim));
}

function httpEncoder(endpoint: string, model: string): Encoder {
  return async (texts) => {
    let response: Response;
    try {
      response = await fetch(endpoint, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ model, texts }),
      });
    } catch (err) {
      throw new ModelUnavailable(`encoder endpoint unreachable: ${err}`);
    }
    if (!response.ok) {
      throw new ModelUnavailable(`encoder endpoint returned HTTP ${response.status}`);
    }
    const body = (await response.json()) as { vectors?: number[][] };
    if (!Array.isArray(body.vectors) || body.vectors.length !== texts.length) {
      throw new ModelUnavailable("encoder endpoint returned a malformed payload");
    }
    return body.vectors;
  };
}

export function resolveEncoder(model: string, endpoint?: string): Encoder {
  if (model.startsWith("hash:")) {
    const dim = Number(model.slice(5));
    if (!Number.isInteger(dim) || dim < 2) {
      throw new ModelUnavailable(`bad hash encoder dimension in ${JSON.stringify(model)}`);
    }
    return hashEncoder(dim);
  }
  if (endpoint) {
    return httpEncoder(endpoint, model);
  }
  throw new ModelUnavailable(
    `model ${JSON.stringify(model)} is not available locally; ` +
      "pass --endpoint for a hosted encoder or use hash:<dim>",
  );
}
