/* tslint:disable */
/* eslint-disable */

/**
 * Flat `[r, lower, upper, blackbox, ...]` rows, last row `[-1, medians...]`.
 */
export function ensemble_curves(n: number, separation: number, seed: number, lambda: number, partitions: number, n_test: number): Float64Array;

export function extent(): number;

/**
 * Flat `[predicted, radius, ...]` over a `grid × grid` lattice.
 */
export function radius_field(n: number, separation: number, seed: number, lambda: number, grid: number): Float64Array;

/**
 * Flat `[p, radius, ...]` for the smoothing certificate at noise rate `noise`.
 */
export function smoothing_curve(noise: number, points: number): Float64Array;

/**
 * Training points as a flat `[x, y, label, ...]` array.
 */
export function training_points(n: number, separation: number, seed: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly ensemble_curves: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly extent: () => number;
    readonly radius_field: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly smoothing_curve: (a: number, b: number) => [number, number, number, number];
    readonly training_points: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
