/* tslint:disable */
/* eslint-disable */

/**
 * Size accounting of a structure built from synthetic keys.
 */
export class BuildView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Entry `i` counts chunks that needed `i` retries.
     */
    retries(): Uint32Array;
    readonly directory_bits: number;
    readonly m: number;
    readonly overhead: number;
    readonly table_bits: number;
    /**
     * Keys whose query disagreed with the stored value (always 0).
     */
    readonly wrong: number;
}

/**
 * Per-cell heights of one coin-flipping placement run.
 */
export class HeightView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    heights(): Uint32Array;
    /**
     * Some key landed `block_len` or more cells past its hash value.
     */
    readonly failed: boolean;
    readonly max_displacement: number;
    readonly mean: number;
}

/**
 * Coupled X and Z queue runs over the same Poisson arrivals.
 */
export class QueueView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    arrivals(): Uint32Array;
    x(): Uint32Array;
    z(): Uint32Array;
    /**
     * Stationary M/D/1 mean at this arrival rate.
     */
    readonly expected_mean: number;
    /**
     * Time average of Z.
     */
    readonly z_mean: number;
}

export function build_summary(m: number, epsilon: number, block_len: number, chunk_size: number, value_bits: number, seed: number): BuildView;

export function height_profile(n: number, epsilon: number, block_len: number, seed: number, poissonised: boolean): HeightView;

export function queue_trace(rho: number, steps: number, seed: number): QueueView;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_buildview_free: (a: number, b: number) => void;
    readonly __wbg_heightview_free: (a: number, b: number) => void;
    readonly __wbg_queueview_free: (a: number, b: number) => void;
    readonly build_summary: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly buildview_directory_bits: (a: number) => number;
    readonly buildview_m: (a: number) => number;
    readonly buildview_overhead: (a: number) => number;
    readonly buildview_retries: (a: number) => [number, number];
    readonly buildview_table_bits: (a: number) => number;
    readonly buildview_wrong: (a: number) => number;
    readonly height_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly heightview_failed: (a: number) => number;
    readonly heightview_heights: (a: number) => [number, number];
    readonly heightview_max_displacement: (a: number) => number;
    readonly heightview_mean: (a: number) => number;
    readonly queue_trace: (a: number, b: number, c: number) => [number, number, number];
    readonly queueview_arrivals: (a: number) => [number, number];
    readonly queueview_expected_mean: (a: number) => number;
    readonly queueview_x: (a: number) => [number, number];
    readonly queueview_z: (a: number) => [number, number];
    readonly queueview_z_mean: (a: number) => number;
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
