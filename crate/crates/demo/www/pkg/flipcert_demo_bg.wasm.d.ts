/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const ensemble_curves: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const extent: () => number;
export const radius_field: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const smoothing_curve: (a: number, b: number) => [number, number, number, number];
export const training_points: (a: number, b: number, c: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
