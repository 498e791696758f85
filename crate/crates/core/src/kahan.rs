//! Compensated accumulation for long sums of widely varying magnitude.
//!
//! The volume integral over the source grid adds ~10^6 terms per time sample;
//! plain summation loses several digits and, worse, depends on evaluation
//! order. Kahan-Babuska compensation in a fixed order keeps the result
//! deterministic and accurate.

use crate::scalar::Scalar;
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy)]
pub struct KahanSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Scalar> Default for KahanSum<T> {
    fn default() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }
}

impl<T: Scalar> KahanSum<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: T) {
        // Neumaier variant: compensate whichever operand is smaller.
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.compensation
    }
}

/// Component-wise compensated 3-vector accumulator.
#[derive(Debug, Clone, Copy)]
pub struct KahanVec3<T> {
    x: KahanSum<T>,
    y: KahanSum<T>,
    z: KahanSum<T>,
}

impl<T: Scalar> Default for KahanVec3<T> {
    fn default() -> Self {
        Self {
            x: KahanSum::new(),
            y: KahanSum::new(),
            z: KahanSum::new(),
        }
    }
}

impl<T: Scalar> KahanVec3<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: Vec3<T>) {
        self.x.add(v.x);
        self.y.add(v.y);
        self.z.add(v.z);
    }

    pub fn value(&self) -> Vec3<T> {
        Vec3::new(self.x.value(), self.y.value(), self.z.value())
    }
}

/// Compensated sum of a slice, in slice order.
pub fn compensated_sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut acc = KahanSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}
