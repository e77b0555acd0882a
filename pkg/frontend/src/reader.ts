/**
 * Read-only parser for roomgen scene containers.
 *
 * Layout (little-endian throughout):
 *   magic   8 bytes "RROOMS01"
 *   header  u32 version, u32 pair count, u32 point budget, u64 base seed
 *   pair    u32 pair index
 *           room A, room B:
 *             u32 point count, u32 aCells, u32 bCells, u64 child seed
 *             pointCount * 3 float32 points, pointCount u32 labels
 *           u32 shared-id count, then that many u32 ids
 *   trailer u32 metadata length, UTF-8 metadata text
 *
 * Arrays are exposed as zero-copy typed-array views whenever alignment
 * permits; a parse never mutates the underlying buffer.
 */
import { readFileSync } from "node:fs";

export const MAGIC = "RROOMS01";
export const SUPPORTED_VERSION = 1;

export class WrongFormatError extends Error {}

export class CorruptContainerError extends Error {
  readonly offset: number;

  constructor(message: string, offset: number) {
    super(`byte offset ${offset}: ${message}`);
    this.offset = offset;
  }
}

export interface RoomView {
  pointCount: number;
  aCells: number;
  bCells: number;
  childSeed: bigint;
  /** Flat [x0, y0, z0, x1, ...] of length pointCount * 3. */
  points: Float32Array;
  labels: Uint32Array;
}

export interface PairRecord {
  pairIndex: number;
  roomA: RoomView;
  roomB: RoomView;
  sharedIds: Uint32Array;
}

class Cursor {
  readonly view: DataView;
  readonly bytes: Uint8Array;
  pos = 0;

  constructor(bytes: Uint8Array) {
    this.bytes = bytes;
    this.view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  }

  need(size: number): void {
    if (this.pos + size > this.bytes.byteLength) {
      throw new CorruptContainerError(
        `need ${size} bytes, only ${this.bytes.byteLength - this.pos} remain`,
        this.pos,
      );
    }
  }

  u32(): number {
    this.need(4);
    const value = this.view.getUint32(this.pos, true);
    this.pos += 4;
    return value;
  }

  u64(): bigint {
    this.need(8);
    const value = this.view.getBigUint64(this.pos, true);
    this.pos += 8;
    return value;
  }

  f32Array(count: number): Float32Array {
    this.need(count * 4);
    const abs = this.bytes.byteOffset + this.pos;
    const out =
      abs % 4 === 0
        ? new Float32Array(this.bytes.buffer, abs, count)
        : new Float32Array(this.bytes.slice(this.pos, this.pos + count * 4).buffer);
    this.pos += count * 4;
    return out;
  }

  u32Array(count: number): Uint32Array {
    this.need(count * 4);
    const abs = this.bytes.byteOffset + this.pos;
    const out =
      abs % 4 === 0
        ? new Uint32Array(this.bytes.buffer, abs, count)
        : new Uint32Array(this.bytes.slice(this.pos, this.pos + count * 4).buffer);
    this.pos += count * 4;
    return out;
  }

  utf8(size: number): string {
    this.need(size);
    const out = new TextDecoder().decode(this.bytes.subarray(this.pos, this.pos + size));
    this.pos += size;
    return out;
  }
}

function readRoom(cursor: Cursor, budget: number): RoomView {
  const at = cursor.pos;
  const pointCount = cursor.u32();
  if (pointCount !== budget) {
    throw new CorruptContainerError(
      `room has ${pointCount} points but the container budget is ${budget}`,
      at,
    );
  }
  const aCells = cursor.u32();
  const bCells = cursor.u32();
  const childSeed = cursor.u64();
  const points = cursor.f32Array(pointCount * 3);
  const labels = cursor.u32Array(pointCount);
  return { pointCount, aCells, bCells, childSeed, points, labels };
}

function validateSharedIds(pair: PairRecord, offset: number): void {
  const present = (labels: Uint32Array) => new Set(labels);
  const inA = present(pair.roomA.labels);
  const inB = present(pair.roomB.labels);
  for (const id of pair.sharedIds) {
    if (id === 0 || !inA.has(id) || !inB.has(id)) {
      throw new CorruptContainerError(`shared id ${id} missing from a room's labels`, offset);
    }
  }
}

export class SceneContainer {
  readonly version: number;
  readonly pointBudget: number;
  readonly baseSeed: bigint;
  readonly configText: string;
  private readonly pairs: PairRecord[];

  private constructor(bytes: Uint8Array) {
    const magic = new TextDecoder().decode(bytes.subarray(0, MAGIC.length));
    if (bytes.byteLength < MAGIC.length || magic !== MAGIC) {
      throw new WrongFormatError("not a scene container (bad magic)");
    }
    const cursor = new Cursor(bytes);
    cursor.pos = MAGIC.length;
    this.version = cursor.u32();
    if (this.version !== SUPPORTED_VERSION) {
      throw new WrongFormatError(`unsupported container version ${this.version}`);
    }
    const pairCount = cursor.u32();
    this.pointBudget = cursor.u32();
    this.baseSeed = cursor.u64();

    this.pairs = [];
    for (let i = 0; i < pairCount; i++) {
      const at = cursor.pos;
      const pairIndex = cursor.u32();
      const roomA = readRoom(cursor, this.pointBudget);
      const roomB = readRoom(cursor, this.pointBudget);
      const sharedIds = cursor.u32Array(cursor.u32());
      const pair: PairRecord = { pairIndex, roomA, roomB, sharedIds };
      validateSharedIds(pair, at);
      this.pairs.push(pair);
    }
    this.configText = cursor.utf8(cursor.u32());
    if (cursor.pos !== bytes.byteLength) {
      throw new CorruptContainerError("trailing bytes after metadata block", cursor.pos);
    }
  }

  static fromBytes(data: Uint8Array | ArrayBuffer): SceneContainer {
    return new SceneContainer(data instanceof Uint8Array ? data : new Uint8Array(data));
  }

  static open(path: string): SceneContainer {
    return SceneContainer.fromBytes(readFileSync(path));
  }

  get pairCount(): number {
    return this.pairs.length;
  }

  getPair(index: number): PairRecord {
    if (!Number.isInteger(index) || index < 0 || index >= this.pairs.length) {
      throw new RangeError(`pair index ${index} out of range [0, ${this.pairs.length})`);
    }
    return this.pairs[index];
  }

  /** Yields ceil(pairCount / batchSize) groups; the final group may be short. */
  *iterBatches(batchSize: number): Generator<PairRecord[]> {
    if (!Number.isInteger(batchSize) || batchSize < 1) {
      throw new RangeError(`batch size must be a positive integer, got ${batchSize}`);
    }
    for (let start = 0; start < this.pairs.length; start += batchSize) {
      yield this.pairs.slice(start, start + batchSize);
    }
  }
}
