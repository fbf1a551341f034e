/* @ts-self-types="./bandset_demo.d.ts" */

/**
 * Size accounting of a structure built from synthetic keys.
 */
export class BuildView {
    static __wrap(ptr) {
        const obj = Object.create(BuildView.prototype);
        obj.__wbg_ptr = ptr;
        BuildViewFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        BuildViewFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_buildview_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get directory_bits() {
        const ret = wasm.buildview_directory_bits(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get m() {
        const ret = wasm.buildview_m(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {number}
     */
    get overhead() {
        const ret = wasm.buildview_overhead(this.__wbg_ptr);
        return ret;
    }
    /**
     * Entry `i` counts chunks that needed `i` retries.
     * @returns {Uint32Array}
     */
    retries() {
        const ret = wasm.buildview_retries(this.__wbg_ptr);
        var v1 = getArrayU32FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 4, 4);
        return v1;
    }
    /**
     * @returns {number}
     */
    get table_bits() {
        const ret = wasm.buildview_table_bits(this.__wbg_ptr);
        return ret;
    }
    /**
     * Keys whose query disagreed with the stored value (always 0).
     * @returns {number}
     */
    get wrong() {
        const ret = wasm.buildview_wrong(this.__wbg_ptr);
        return ret >>> 0;
    }
}
if (Symbol.dispose) BuildView.prototype[Symbol.dispose] = BuildView.prototype.free;

/**
 * Per-cell heights of one coin-flipping placement run.
 */
export class HeightView {
    static __wrap(ptr) {
        const obj = Object.create(HeightView.prototype);
        obj.__wbg_ptr = ptr;
        HeightViewFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        HeightViewFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_heightview_free(ptr, 0);
    }
    /**
     * Some key landed `block_len` or more cells past its hash value.
     * @returns {boolean}
     */
    get failed() {
        const ret = wasm.heightview_failed(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * @returns {Uint32Array}
     */
    heights() {
        const ret = wasm.heightview_heights(this.__wbg_ptr);
        var v1 = getArrayU32FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 4, 4);
        return v1;
    }
    /**
     * @returns {number}
     */
    get max_displacement() {
        const ret = wasm.heightview_max_displacement(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {number}
     */
    get mean() {
        const ret = wasm.heightview_mean(this.__wbg_ptr);
        return ret;
    }
}
if (Symbol.dispose) HeightView.prototype[Symbol.dispose] = HeightView.prototype.free;

/**
 * Coupled X and Z queue runs over the same Poisson arrivals.
 */
export class QueueView {
    static __wrap(ptr) {
        const obj = Object.create(QueueView.prototype);
        obj.__wbg_ptr = ptr;
        QueueViewFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        QueueViewFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_queueview_free(ptr, 0);
    }
    /**
     * @returns {Uint32Array}
     */
    arrivals() {
        const ret = wasm.queueview_arrivals(this.__wbg_ptr);
        var v1 = getArrayU32FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 4, 4);
        return v1;
    }
    /**
     * Stationary M/D/1 mean at this arrival rate.
     * @returns {number}
     */
    get expected_mean() {
        const ret = wasm.queueview_expected_mean(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Uint32Array}
     */
    x() {
        const ret = wasm.queueview_x(this.__wbg_ptr);
        var v1 = getArrayU32FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 4, 4);
        return v1;
    }
    /**
     * @returns {Uint32Array}
     */
    z() {
        const ret = wasm.queueview_z(this.__wbg_ptr);
        var v1 = getArrayU32FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 4, 4);
        return v1;
    }
    /**
     * Time average of Z.
     * @returns {number}
     */
    get z_mean() {
        const ret = wasm.queueview_z_mean(this.__wbg_ptr);
        return ret;
    }
}
if (Symbol.dispose) QueueView.prototype[Symbol.dispose] = QueueView.prototype.free;

/**
 * @param {number} m
 * @param {number} epsilon
 * @param {number} block_len
 * @param {number} chunk_size
 * @param {number} value_bits
 * @param {number} seed
 * @returns {BuildView}
 */
export function build_summary(m, epsilon, block_len, chunk_size, value_bits, seed) {
    const ret = wasm.build_summary(m, epsilon, block_len, chunk_size, value_bits, seed);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return BuildView.__wrap(ret[0]);
}

/**
 * @param {number} n
 * @param {number} epsilon
 * @param {number} block_len
 * @param {number} seed
 * @param {boolean} poissonised
 * @returns {HeightView}
 */
export function height_profile(n, epsilon, block_len, seed, poissonised) {
    const ret = wasm.height_profile(n, epsilon, block_len, seed, poissonised);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return HeightView.__wrap(ret[0]);
}

/**
 * @param {number} rho
 * @param {number} steps
 * @param {number} seed
 * @returns {QueueView}
 */
export function queue_trace(rho, steps, seed) {
    const ret = wasm.queue_trace(rho, steps, seed);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return QueueView.__wrap(ret[0]);
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_30c8987f7c2ed4e2: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./bandset_demo_bg.js": import0,
    };
}

const BuildViewFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_buildview_free(ptr, 1));
const HeightViewFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_heightview_free(ptr, 1));
const QueueViewFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_queueview_free(ptr, 1));

function getArrayU32FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getUint32ArrayMemory0().subarray(ptr / 4, ptr / 4 + len);
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint32ArrayMemory0 = null;
function getUint32ArrayMemory0() {
    if (cachedUint32ArrayMemory0 === null || cachedUint32ArrayMemory0.byteLength === 0) {
        cachedUint32ArrayMemory0 = new Uint32Array(wasm.memory.buffer);
    }
    return cachedUint32ArrayMemory0;
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedUint32ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('bandset_demo_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
