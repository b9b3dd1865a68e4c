#include "cqs/atomics/dcas.hpp"

#include <cassert>
#include <stdexcept>

namespace cqs::atomics {

// Attempts to place the owner's descriptor into *addr. Returns exp when the
// cell held exp (the install ran, gated on the owner's status); returns the
// conflicting word otherwise. Installer records found on the way are
// finished first, so the attempt never blocks behind one. The record goes
// on the heap: helpers may still resolve it after this frame unwinds, so it
// is reclaimed through the grace-period machinery like everything else.
Word DcasDomain::install(Descriptor* owner, std::atomic<Word>* addr, Word exp) const {
    auto* ins = new Installer{owner, addr, exp};
    assert((reinterpret_cast<Word>(ins) & kTagMask) == 0);
    for (;;) {
        Word cur = exp;
        if (addr->compare_exchange_strong(cur, mark(ins), std::memory_order_seq_cst)) {
            finish_install(ins);
            reclaimer_.retire(ins);
            return exp;
        }
        if (is_installer(cur)) {
            finish_install(as_installer(cur));
            continue;
        }
        reclaimer_.retire(ins);  // never published
        return cur;
    }
}

// Resolves an installer record: the descriptor goes in only while its
// operation is still undecided; otherwise the cell reverts to the expected
// value. Any number of threads may race here — only the first CAS acts.
void DcasDomain::finish_install(Installer* ins) {
    Word next = ins->owner->status.load(std::memory_order_seq_cst) == kUndecided
                    ? mark(ins->owner)
                    : ins->exp;
    Word expected = mark(ins);
    ins->addr->compare_exchange_strong(expected, next, std::memory_order_seq_cst);
}

bool DcasDomain::help(Descriptor* d) const {
    if (d->status.load(std::memory_order_seq_cst) == kUndecided) {
        Status decided = kSucceeded;
        for (int j = 0; j < 2 && decided == kSucceeded; ++j) {
            for (;;) {
                Word seen = install(d, d->addr[j], d->exp[j]);
                if (seen == d->exp[j]) break;  // descriptor in (or value already restored)
                if (is_descriptor(seen)) {
                    Descriptor* rival = as_descriptor(seen);
                    if (rival == d) break;  // another helper got here first
                    help(rival);
                    continue;
                }
                decided = kFailed;  // committed value mismatch
                break;
            }
        }
        Status expect = kUndecided;
        d->status.compare_exchange_strong(expect, decided, std::memory_order_seq_cst);
    }

    bool ok = d->status.load(std::memory_order_seq_cst) == kSucceeded;
    for (int j = 0; j < 2; ++j) {
        Word expected = mark(d);
        d->addr[j]->compare_exchange_strong(expected, ok ? d->val[j] : d->exp[j],
                                            std::memory_order_seq_cst);
    }
    return ok;
}

bool DcasDomain::dcas(DcasCell& a, Word ea, Word na, DcasCell& b, Word eb, Word nb) {
    if (&a == &b) throw std::invalid_argument("dcas: aliased cells");
    assert((ea & kTagMask) == 0 && (na & kTagMask) == 0 && (eb & kTagMask) == 0 &&
           (nb & kTagMask) == 0 && "dcas operands must leave tag bits clear");

    if (mode_ == DcasMode::locked) return dcas_locked(a, ea, na, b, eb, nb);

    auto* d = new Descriptor;
    if (&a.v_ < &b.v_) {
        d->addr[0] = &a.v_;
        d->exp[0] = ea;
        d->val[0] = na;
        d->addr[1] = &b.v_;
        d->exp[1] = eb;
        d->val[1] = nb;
    } else {
        d->addr[0] = &b.v_;
        d->exp[0] = eb;
        d->val[0] = nb;
        d->addr[1] = &a.v_;
        d->exp[1] = ea;
        d->val[1] = na;
    }
    assert((reinterpret_cast<Word>(d) & kTagMask) == 0);

    bool ok = help(d);
    reclaimer_.retire(d);
    return ok;
}

Word DcasDomain::read(const DcasCell& c) const {
    if (mode_ == DcasMode::locked) {
        // Writes happen under the lock but each is a single atomic store;
        // one plain load is always a value that was logically present.
        return c.v_.load(std::memory_order_seq_cst);
    }
    Word w = c.v_.load(std::memory_order_seq_cst);
    if (is_installer(w)) {
        // The owning operation is not yet decided for this cell: its logical
        // content is still the expected value recorded by the installer.
        return as_installer(w)->exp;
    }
    if (is_descriptor(w)) {
        const Descriptor* d = as_descriptor(w);
        return d->status.load(std::memory_order_seq_cst) == kSucceeded ? d->val_for(&c.v_)
                                                                       : d->exp_for(&c.v_);
    }
    return w;
}

bool DcasDomain::cas(DcasCell& c, Word expected, Word desired) {
    assert((expected & kTagMask) == 0 && (desired & kTagMask) == 0);
    if (mode_ == DcasMode::locked) {
        std::lock_guard<std::mutex> lk(lock_);
        Word cur = c.v_.load(std::memory_order_seq_cst);
        if (cur != expected) return false;
        c.v_.store(desired, std::memory_order_seq_cst);
        return true;
    }
    for (;;) {
        Word cur = expected;
        if (c.v_.compare_exchange_strong(cur, desired, std::memory_order_seq_cst)) return true;
        if (is_installer(cur)) {
            finish_install(as_installer(cur));
            continue;
        }
        if (is_descriptor(cur)) {
            help(as_descriptor(cur));
            continue;
        }
        return false;  // settled value, genuine mismatch
    }
}

bool DcasDomain::dcas_locked(DcasCell& a, Word ea, Word na, DcasCell& b, Word eb, Word nb) {
    std::lock_guard<std::mutex> lk(lock_);
    if (a.v_.load(std::memory_order_seq_cst) != ea ||
        b.v_.load(std::memory_order_seq_cst) != eb)
        return false;
    a.v_.store(na, std::memory_order_seq_cst);
    b.v_.store(nb, std::memory_order_seq_cst);
    return true;
}

}  // namespace cqs::atomics
