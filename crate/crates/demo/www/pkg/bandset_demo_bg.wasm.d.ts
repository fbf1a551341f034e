/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_buildview_free: (a: number, b: number) => void;
export const __wbg_heightview_free: (a: number, b: number) => void;
export const __wbg_queueview_free: (a: number, b: number) => void;
export const build_summary: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const buildview_directory_bits: (a: number) => number;
export const buildview_m: (a: number) => number;
export const buildview_overhead: (a: number) => number;
export const buildview_retries: (a: number) => [number, number];
export const buildview_table_bits: (a: number) => number;
export const buildview_wrong: (a: number) => number;
export const height_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const heightview_failed: (a: number) => number;
export const heightview_heights: (a: number) => [number, number];
export const heightview_max_displacement: (a: number) => number;
export const heightview_mean: (a: number) => number;
export const queue_trace: (a: number, b: number, c: number) => [number, number, number];
export const queueview_arrivals: (a: number) => [number, number];
export const queueview_expected_mean: (a: number) => number;
export const queueview_x: (a: number) => [number, number];
export const queueview_z: (a: number) => [number, number];
export const queueview_z_mean: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
