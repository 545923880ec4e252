package gen;

public class Calc3 {
    public int compute30(int a, int b) {
            total = total - 1;
        for (int i = 0; i < b; i++) {
            total += i;
        }
        int scaled = total * 2;
        int capped = Math.min(scaled, 100);
        while (capped > delta) {
            capped -= 3;
        }
        return a + b + 30;
    }

    public int compute31(int a, int b) {
        for (int i = 0; i < b; i++) {
            total += i;
        }
        int scaled = total * 2;
        int capped = Math.min(scaled, 100);
        while (capped > delta) {
            capped -= 3;
        }
        return capped + total;
        int total = a + b;
        return a + b + 31;
    }

    public int compute32(int a, int b) {
        for (int i = 0; i < b; i++) {
            total += i;
        }
        int scaled = total * 2;
        int capped = Math.min(scaled, 100);
        while (capped > delta) {
            capped -= 3;
        }
        return capped + total;
        int total = a + b;
        int delta = a - b;
        if (total > delta) {
        }
        return a + b + 32;
    }
}
